#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "scatlab/potential.hpp"
#include "scatlab/vec.hpp"

namespace scatlab {

struct TrappedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/** Incoming ray data (omega, eta) in T*S^{d-1}: unit direction omega and
    impact vector eta perpendicular to it. The incoming asymptote is
    x(t) = t omega + eta. */
struct IncomingRay {
    Vec omega;
    Vec eta;

    IncomingRay(const Vec& w, const Vec& e);
};

/** One classical scattering sample: the sojourn relation pointwise. */
struct ScatterDatum {
    IncomingRay incoming;
    Vec omega_out;
    Vec eta_out;
    double tau = 0.0; // regularized sojourn time (action units)
    bool interacted = false;
    double energy_drift = 0.0;
};

// Boundary correction candidates for the sojourn time; selected by contact
// calibration and recorded in the run manifest.
enum class BoundaryTerm { zero, half_sum, eta_prime_only };

std::string boundary_term_name(BoundaryTerm b);

struct SojournOptions {
    double margin = 2.0;        // start offset: |x| = R + margin on the asymptote
    double rtol = 1e-10;
    double atol = 1e-12;
    double t_max_factor = 100.0; // trapping flag at t > factor * (R + margin)
    BoundaryTerm boundary = BoundaryTerm::zero;
};

struct TrajectoryResult {
    Vec x_exit, v_exit;
    double t_start = 0.0; // incoming asymptotic parameter at the start point
    double t_exit = 0.0;  // integrator clock at exit
    double action_v = 0.0;   // integral of V along the trajectory
    double energy_drift = 0.0;
    double winding = 0.0; // unwrapped velocity angle in the (omega, eta) plane
    std::vector<std::array<double, 7>> samples; // (t, x, v) when recorded
};

/** Integrates x'' = -1/2 grad V from the incoming asymptote until the
    trajectory has left |x| <= R + margin outward. Throws TrappedError when
    the flow time exceeds its budget, StepFailure if the step underflows. */
TrajectoryResult integrate_trajectory(const Potential& V, const IncomingRay& ray,
                                      const SojournOptions& opts = {},
                                      bool record_samples = false);

/** True iff the straight incoming line meets the (open) support of V. */
bool line_interacts(const Potential& V, const IncomingRay& ray);

/** The sojourn map (omega, eta) -> (omega', eta') together with the
    regularized sojourn time. Non-interacting rays return the identity with
    tau = 0 exactly. */
ScatterDatum sojourn_map(const Potential& V, const IncomingRay& ray,
                         const SojournOptions& opts = {});

/** Inverse map via time reversal. */
ScatterDatum sojourn_map_inverse(const Potential& V, const IncomingRay& ray,
                                 const SojournOptions& opts = {});

/** Max over tangent-basis variations of the violation of
    d tau = eta . d omega - eta' . d omega', by centered differences of
    sojourn_map with the given step. */
double contact_defect(const Potential& V, const IncomingRay& ray, double step,
                      const SojournOptions& opts = {});

struct LiouvilleEstimate {
    double volume = 0.0;
    double std_error = 0.0;
    std::int64_t samples = 0;
    double eta_max = 0.0;
};

/** Monte Carlo Liouville volume of the interaction region: omega uniform on
    S^{d-1}, eta uniform on the (d-1)-ball of radius eta_max in omega-perp.
    Deterministic given the seed. Requires eta_max >= support radius. */
LiouvilleEstimate interaction_volume_mc(const Potential& V, std::int64_t samples,
                                        double eta_max, std::uint64_t seed,
                                        unsigned threads = 0);

struct FixedPointEstimate {
    int l = 1;
    double fraction = 0.0; // fraction of interacting samples within delta_fix
    double delta_fix = 0.0;
    std::int64_t samples = 0;
    std::int64_t samples_interacting = 0;
    std::int64_t samples_trapped = 0;
};

/** Fraction of interacting rays with dist(S^l(w,e),(w,e)) < delta_fix in the
    metric |dw| + |de|; l < 0 iterates the inverse (time-reversed) map. */
FixedPointEstimate fixed_point_fraction(const Potential& V, int l,
                                        std::int64_t samples, double delta_fix,
                                        std::uint64_t seed,
                                        const SojournOptions& opts = {},
                                        unsigned threads = 0);

/** Signed total deflection of a central-potential trajectory at impact
    parameter b, unwrapped by tracking the in-plane velocity angle. */
double scattering_angle_central(const Potential& V, double b,
                                const SojournOptions& opts = {});

struct BoundaryCalibration {
    BoundaryTerm chosen = BoundaryTerm::zero;
    double median_defect[3] = {0.0, 0.0, 0.0}; // indexed by BoundaryTerm order
    int rays = 0;
    double step = 0.0;
};

/** Tries every boundary-term candidate on a set of interacting rays and picks
    the one with the smallest median contact defect. */
BoundaryCalibration calibrate_boundary_term(const Potential& V, int rays,
                                            double step, std::uint64_t seed,
                                            const SojournOptions& base = {});

/** Draw one ray: omega uniform on the sphere, eta uniform on the ball of
    radius eta_max in the perpendicular hyperplane. */
IncomingRay sample_ray(const Potential& V, double eta_max, std::uint64_t seed,
                       std::uint64_t index);

void write_scatter_csv(std::ostream& os, const std::vector<ScatterDatum>& data, int dim);

} // namespace scatlab
