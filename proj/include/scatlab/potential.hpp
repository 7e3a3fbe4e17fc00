#pragma once

#include <string>
#include <vector>

#include "scatlab/vec.hpp"
#include <nlohmann/json_fwd.hpp>

namespace scatlab {

enum class PotentialKind { zero, radial_bump, bump_sum };

struct Bump {
    double amplitude = 0.0; // energy units, |amplitude| < 1
    double radius = 1.0;    // support radius, > 0
    Vec center = {0.0, 0.0, 0.0};
};

/** Declarative description of a smooth compactly supported potential:
    a finite sum of mollifier bumps V0 * exp(1 - 1/(1 - |x-c|^2/R^2)). */
struct PotentialSpec {
    PotentialKind kind = PotentialKind::zero;
    int dimension = 3; // 2 or 3
    std::vector<Bump> bumps;

    nlohmann::json to_json() const;
    static PotentialSpec from_json(const nlohmann::json& j);
};

class Potential {
  public:
    const PotentialSpec& spec() const { return spec_; }
    int dimension() const { return spec_.dimension; }

    // smallest ball about the origin containing every bump support;
    // V and grad V vanish identically for |x| >= R
    double support_radius() const { return support_radius_; }

    double value(const Vec& x) const;
    Vec gradient(const Vec& x) const;

    bool is_zero() const { return spec_.kind == PotentialKind::zero || spec_.bumps.empty(); }
    // radially symmetric about the origin
    bool is_central() const;
    // radial profile V(r); valid only when is_central()
    double radial_value(double r) const;
    double radial_derivative(double r) const;

    // potential with every amplitude divided by s (used by energy rescaling)
    Potential scaled_amplitudes(double inv_scale) const;

  private:
    friend Potential construct_potential(const PotentialSpec&);
    PotentialSpec spec_;
    double support_radius_ = 0.0;
};

/** Validates the spec (positive radii, per-bump |V0| < 1, pointwise sup|V| < 1
    by dense sampling) and builds the evaluator. Throws std::invalid_argument. */
Potential construct_potential(const PotentialSpec& spec);

struct EnergyProblem {
    double h = 0.1; // semiclassical parameter, > 0
    double E = 1.0; // energy, > 0
    Potential potential;
};

/** (h, E, V) -> (h/sqrt(E), 1, V/E); identity when E == 1. */
EnergyProblem rescale_to_unit_energy(const EnergyProblem& problem);

} // namespace scatlab
