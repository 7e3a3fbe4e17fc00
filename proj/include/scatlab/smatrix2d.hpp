#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "scatlab/potential.hpp"
#include "scatlab/spectral.hpp"

namespace scatlab {

struct Grid2DOptions {
    double points_per_wavelength = 12.0; // precondition demands >= 10
    double points_per_radius = 10.0;     // resolve the bump profile
    double spacing_override = 0.0;       // takes precedence when > 0
};

/** Cell-centered square lattice covering the support, symmetric under the
    quarter-turn (x,y) -> (-y,x); unknowns live on nodes where V != 0. */
struct InteriorGrid {
    double spacing = 0.0;
    int n_side = 0;        // lattice is n_side x n_side over [-extent, extent]^2
    double extent = 0.0;
    std::vector<int> ix, iy;            // lattice indices of interior nodes
    std::vector<double> xs, ys, vvals;  // coordinates and V at interior nodes
};

InteriorGrid make_interior_grid(const Potential& V, double h, const Grid2DOptions& opts);

struct ScatteredField {
    std::vector<cplx> u;   // total field at interior nodes
    std::vector<cplx> far; // far-field amplitude at n_far equispaced angles
    double residual = 0.0; // integral-equation residual of the discrete solve
};

/** Nystrom solve of u = u_inc - (1/h^2) G_k * (V u) for one incident plane
    wave travelling along angle theta_in; far field read off the standard
    far-field integral at n_far angles. d = 2, h >= 0.2 required. */
ScatteredField solve_scattered_field(const Potential& V, double h, double theta_in,
                                     const Grid2DOptions& opts = {}, int n_far = 128);

struct SMatrix2D {
    double h = 0.0;
    int n_ang = 0;
    Eigen::MatrixXcd s; // rows: outgoing node, columns: incoming node
    double unitarity_defect = 0.0;
    double grid_spacing = 0.0;
    int interior_nodes = 0;
};

/** Dense unitary S-matrix on n_ang equispaced angular nodes. The far-field
    normalization and antipodal index conventions are fixed so that V = 0
    gives S = I exactly and central potentials reproduce the partial-wave
    eigenphases e^{2 i delta_l}. */
SMatrix2D build_smatrix(const Potential& V, double h, int n_ang,
                        const Grid2DOptions& opts = {});

/** Eigenphases of the (near-)unitary dense matrix; eigenvalues are projected
    radially to the circle and must satisfy ||lambda|-1| <= 2 * defect. */
EigenphaseSet eigenphases(const SMatrix2D& sm);

/** Raw matrix dump: little-endian row-major complex doubles plus a JSON
    header (n_ang, h, grid spec, unitarity defect). */
void write_smatrix_binary(const std::string& path_prefix, const SMatrix2D& sm);

} // namespace scatlab
