#pragma once

#include <complex>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "scatlab/partialwave.hpp"

namespace scatlab {

using cplx = std::complex<double>;

/** Laurent polynomial sum_{k=-K..K} a_k z^k restricted to the unit circle
    (negative powers realized through conjugation). */
struct LaurentPoly {
    int k_min = 0;
    std::vector<cplx> coeff; // coeff[i] multiplies z^{k_min + i}

    cplx eval(double theta) const;
    cplx at_one() const;
    cplx a0() const;
    /** p(z)/(z-1) on the circle; requires p(1) = 0. */
    cplx eval_over_zminus1(double theta) const;

    static LaurentPoly z_pow_minus_one(int k); // z^k - 1
    std::string label() const;
};

/** Admissible circle test function: Laurent polynomial with p(1) = 0, or a
    smooth sector mollifier vanishing identically near angle 0. */
class TestFunction {
  public:
    static TestFunction polynomial(LaurentPoly p);
    static TestFunction sector_mollifier(double phi0, double phi1, double width);

    cplx operator()(double theta) const;
    /** continuous extension of f(z)/(z-1) to z = 1 */
    cplx over_zminus1(double theta) const;
    bool admissible() const;
    bool is_polynomial() const { return poly_.has_value(); }
    const LaurentPoly& poly() const { return *poly_; }

  private:
    TestFunction() = default;
    std::optional<LaurentPoly> poly_;
    double phi0_ = 0.0, phi1_ = 0.0, width_ = 0.0;
};

/** sup_{|z|=1, z != 1} |f(z)/(z-1)| by grid search with doubling until the
    change drops below 1e-6. */
double weighted_norm(const TestFunction& f, int grid_init = 1 << 12);

enum class PhaseSource { central_table, dense_2d };

struct WeightedPhase {
    double beta;   // in (-pi, pi]
    double weight; // multiplicity d_l, or 1 for dense sources
};

/** Full multiset of eigenphases of S_h with weights. */
struct EigenphaseSet {
    std::vector<WeightedPhase> phases;
    PhaseSource source = PhaseSource::central_table;
    double h = 0.0;
    int d = 3;

    // tail envelope |e^{i beta_l} - 1| <= C exp(-c l) for l > l_max, fitted
    // from the generating table (central sources only)
    bool has_tail = false;
    double tail_log_c = 0.0; // log C
    double tail_rate = 0.0;  // c > 0
    int tail_l_max = 0;

    static EigenphaseSet from_phase_table(const PhaseTable& table);
    double total_weight() const;
    /** bound on sum_{l > l_max} d_l |e^{i beta_l} - 1| from the fitted envelope */
    double tail_weight_bound() const;
};

void eigenphase_csv(std::ostream& os, const EigenphaseSet& set);

struct PairingResult {
    cplx value;
    double tail_bound = 0.0; // contribution bound for rows beyond the table
};

/** <mu_h, f> = (1/c_V) (2 pi h)^{d-1} sum_n w_n f(e^{i beta_n}).
    Rejects f with f(1) != 0. */
PairingResult pair_measure(const EigenphaseSet& phases, const TestFunction& f,
                           double c_v, double h, int d);

/** Weighted number of eigenphases with beta mod 2pi in the closed sector
    [phi0, phi1]; requires 0 < phi0 < phi1 < 2pi. */
double count_sector(const EigenphaseSet& phases, double phi0, double phi1);

struct TraceReport {
    std::string poly_label;
    cplx lhs;
    double rhs = 0.0;
    double rel_error = 0.0;
    double tail_bound = 0.0;
    double vol_std_error = 0.0; // Monte Carlo contribution when applicable
    // cutoff variant
    bool has_cutoff = false;
    double rho_r = 0.0, rho_r_star = 0.0;
    cplx cutoff_lhs;
    double cutoff_rhs = 0.0;
    double cutoff_rel_error = 0.0;
};

/** Tr p(S_h) vs Vol(I)/(2 pi h)^{d-1} * (1/2pi) * circle integral of p,
    the latter exact from the coefficients. Requires p(1) = 0. */
TraceReport trace_check(const EigenphaseSet& phases, const LaurentPoly& p,
                        double vol_interaction, double h, int d,
                        double vol_std_error = 0.0);

/** Central-case cutoff trace: LHS = sum_l d_l rho(h^2 l(l+d-2)) (e^{i beta_l}-1),
    RHS = -(2 pi h)^{-(d-1)} * integral of rho(|eta|^2) over the interaction
    region, by radial quadrature. rho is 1 on [0, R^2], 0 beyond R*^2, cosine
    taper between. */
TraceReport cutoff_trace_check(const PhaseTable& table, double rho_r,
                               double rho_r_star, double h, int d);

struct MeasureReport {
    double h = 0.0;
    int d = 3;
    double c_v = 0.0;
    cplx pairing;
    double pairing_tail = 0.0;
    double n_sector = 0.0;
    double phi0 = 0.0, phi1 = 0.0;
    double normalized_count = 0.0; // (2 pi h)^{d-1} N_h / c_V
    double limit_target = 0.0;     // (phi1 - phi0) / (2 pi)
    double rel_error = 0.0;
};

struct SectorGrid {
    int count = 16;
    double margin = 0.15; // keep sectors away from angle 0
};

struct EquiRow {
    double h;
    double phi0, phi1;
    double count;
    double normalized;
    double target;
    double deviation;
};

struct EquiReport {
    std::vector<EquiRow> rows;
    std::vector<std::pair<double, double>> sup_deviation; // per h
    bool degenerate = false;                              // c_V = 0 flagged
};

EquiReport equidistribution_report(const std::vector<EigenphaseSet>& sets,
                                   double c_v, const SectorGrid& grid);

struct Histogram {
    std::vector<double> edges;   // size bins+1 over [0, 2pi)
    std::vector<double> counts;  // weighted
    std::vector<double> density; // (2 pi h)^{d-1} count / (c_V binwidth)
};

Histogram phase_histogram(const EigenphaseSet& phases, int bins, double c_v);

/** Liouville volume of the interaction region of a central potential:
    2 R^{d-1}/(d-1)! * (2 pi)^{d-1}. */
double interaction_volume_central(double support_radius, int d);

/** Counts of phases with |beta| in [delta 2^{-(j+1)}, delta 2^{-j}). */
std::vector<double> dyadic_shell_counts(const EigenphaseSet& phases, double delta,
                                        int j_count);

} // namespace scatlab
