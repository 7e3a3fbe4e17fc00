#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "scatlab/potential.hpp"
#include <nlohmann/json_fwd.hpp>

namespace scatlab {

/** Radial potential profile for the phase-shift solver. Piecewise-smooth
    profiles are allowed for oracle tests; `breakpoints` lists the radii where
    smoothness fails and the profile is taken left-continuous there. */
struct RadialProfile {
    std::function<double(double)> value;
    double support_radius = 0.0;
    std::vector<double> breakpoints;
    double min_value = 0.0; // lower bound of V, used for the start-radius rule

    static RadialProfile from_potential(const Potential& V);
};

struct RadialSolveOptions {
    int n_sub = 120;        // fixed RK4 step = h / n_sub inside the support
    double efold_cap = 200; // start integration where the centrifugal barrier
                            // suppresses the channel by exp(-efold_cap)
};

/** Unwrapped scattering phase delta_l for -h^2 w'' + [V + h^2(nu^2-1/4)/r^2] w = w,
    nu = l + (d-2)/2, via the variable-phase equation
    delta'(r) = -(V/h) [cos(delta) S(r/h) + sin(delta) C(r/h)]^2. */
double radial_delta(const RadialProfile& V, double h, int l, int d,
                    const RadialSolveOptions& opts = {});

/** Eigenphase beta = 2 delta_l mapped to (-pi, pi]. V must be central. */
double radial_phase_shift(const Potential& V, double h, int l, int d,
                          const RadialSolveOptions& opts = {});

/** dim ker(Laplace_{S^{d-1}} - l(l+d-2)) via binomial counts. */
long long multiplicity(int d, int l);

struct PhaseRow {
    int l;
    double nu;
    double beta;        // in (-pi, pi]
    long long mult;     // d_l
    double abs_s_minus_1; // |e^{i beta} - 1|
    double delta_total; // unwrapped
};

struct TailFit {
    int onset_l = 0;
    int points = 0;
    double slope = 0.0;
    double intercept = 0.0; // fit of log|e^{i beta}-1| vs l
    double correlation = 0.0;
};

struct PhaseTable {
    double h = 0.0;
    int d = 3;
    int l_max = 0;
    double support_radius = 0.0;
    std::vector<PhaseRow> rows;
    TailFit tail;
};

/** Default L_max when negative: ceil(2R/h) + 10. Requires
    L_max >= ceil(2R/h); rows computed by a parallel map over l. */
PhaseTable phase_table(const Potential& V, double h, int d, int l_max = -1,
                       const RadialSolveOptions& opts = {}, unsigned threads = 0);

void phase_table_csv(std::ostream& os, const PhaseTable& table);
nlohmann::json phase_table_meta_json(const PhaseTable& table);
PhaseTable phase_table_from_csv(std::istream& is);

double wrap_pm_pi(double angle);

} // namespace scatlab
