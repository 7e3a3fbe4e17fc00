#include "scatlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace scatlab {

namespace {

double kahan_total(const std::vector<double>& xs) {
    double s = 0.0, c = 0.0;
    for (double x : xs) {
        const double y = x - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

// compensated complex accumulation in fixed order
struct KahanC {
    double sr = 0, cr = 0, si = 0, ci = 0;
    void add(cplx z) {
        double y = z.real() - cr, t = sr + y;
        cr = (t - sr) - y;
        sr = t;
        y = z.imag() - ci;
        t = si + y;
        ci = (t - si) - y;
        si = t;
    }
    cplx total() const { return {sr, si}; }
};

double mod_2pi(double beta) {
    double m = std::fmod(beta, 2.0 * M_PI);
    if (m < 0.0) m += 2.0 * M_PI;
    return m;
}

// C^infinity step: 0 for t <= 0, 1 for t >= 1
double smoothstep(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / t);
    const double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

} // namespace

cplx LaurentPoly::eval(double theta) const {
    const cplx z = std::polar(1.0, theta);
    cplx acc = 0.0;
    cplx zk = std::polar(1.0, k_min * theta);
    for (const cplx& a : coeff) {
        acc += a * zk;
        zk *= z;
    }
    return acc;
}

cplx LaurentPoly::at_one() const {
    cplx s = 0.0;
    for (const cplx& a : coeff) s += a;
    return s;
}

cplx LaurentPoly::a0() const {
    const int i = -k_min;
    if (i < 0 || i >= static_cast<int>(coeff.size())) return 0.0;
    return coeff[i];
}

cplx LaurentPoly::eval_over_zminus1(double theta) const {
    // p(z) = z^{k_min} P(z); synthetic division P = (z-1) Q
    const int n = static_cast<int>(coeff.size()) - 1;
    if (n < 0) return 0.0;
    std::vector<cplx> q(std::max(0, n));
    cplx carry = coeff[n];
    for (int j = n - 1; j >= 0; --j) {
        q[j] = carry;
        carry = coeff[j] + carry;
    }
    const cplx z = std::polar(1.0, theta);
    cplx acc = 0.0;
    cplx zk = std::polar(1.0, k_min * theta);
    for (const cplx& a : q) {
        acc += a * zk;
        zk *= z;
    }
    return acc;
}

LaurentPoly LaurentPoly::z_pow_minus_one(int k) {
    LaurentPoly p;
    if (k == 0) {
        p.k_min = 0;
        p.coeff = {cplx(0.0)};
        return p;
    }
    p.k_min = std::min(0, k);
    p.coeff.assign(std::abs(k) + 1, cplx(0.0));
    p.coeff[k - p.k_min] = 1.0;
    p.coeff[-p.k_min] += -1.0;
    return p;
}

std::string LaurentPoly::label() const {
    std::string s;
    char buf[96];
    for (std::size_t i = 0; i < coeff.size(); ++i) {
        if (coeff[i] == cplx(0.0)) continue;
        const int k = k_min + static_cast<int>(i);
        std::snprintf(buf, sizeof buf, "%s(%g%+gi)z^%d", s.empty() ? "" : " + ",
                      coeff[i].real(), coeff[i].imag(), k);
        s += buf;
    }
    return s.empty() ? "0" : s;
}

TestFunction TestFunction::polynomial(LaurentPoly p) {
    TestFunction f;
    f.poly_ = std::move(p);
    return f;
}

TestFunction TestFunction::sector_mollifier(double phi0, double phi1, double width) {
    if (!(width > 0.0) || !(phi0 < phi1))
        throw std::invalid_argument("mollifier requires width > 0 and phi0 < phi1");
    if (!(phi0 - width > 0.0) || !(phi1 + width < 2.0 * M_PI))
        throw std::invalid_argument("mollifier support must avoid angle 0");
    TestFunction f;
    f.phi0_ = phi0;
    f.phi1_ = phi1;
    f.width_ = width;
    return f;
}

cplx TestFunction::operator()(double theta) const {
    if (poly_) return poly_->eval(theta);
    const double m = mod_2pi(theta);
    return smoothstep((m - (phi0_ - width_)) / width_) *
           smoothstep(((phi1_ + width_) - m) / width_);
}

cplx TestFunction::over_zminus1(double theta) const {
    if (poly_) return poly_->eval_over_zminus1(theta);
    const double m = mod_2pi(theta);
    if (m <= phi0_ - width_ || m >= phi1_ + width_) return 0.0;
    return (*this)(theta) / (std::polar(1.0, theta) - cplx(1.0));
}

bool TestFunction::admissible() const {
    if (poly_) return std::abs(poly_->at_one()) < 1e-12;
    return true; // construction already keeps the support away from 1
}

double weighted_norm(const TestFunction& f, int grid_init) {
    if (!f.admissible()) throw std::invalid_argument("test function with f(1) != 0");
    double prev = -1.0;
    for (int m = grid_init; m <= (1 << 22); m *= 2) {
        double mx = 0.0;
        for (int j = 0; j < m; ++j) {
            const double theta = 2.0 * M_PI * j / m;
            mx = std::max(mx, std::abs(f.over_zminus1(theta)));
        }
        if (prev >= 0.0 && std::abs(mx - prev) < 1e-6) return mx;
        prev = mx;
    }
    return prev;
}

EigenphaseSet EigenphaseSet::from_phase_table(const PhaseTable& table) {
    EigenphaseSet set;
    set.source = PhaseSource::central_table;
    set.h = table.h;
    set.d = table.d;
    set.phases.reserve(table.rows.size());
    for (const auto& r : table.rows)
        set.phases.push_back({r.beta, static_cast<double>(r.mult)});
    if (table.tail.points >= 2 && table.tail.slope < 0.0) {
        set.has_tail = true;
        set.tail_log_c = table.tail.intercept;
        set.tail_rate = -table.tail.slope;
        set.tail_l_max = table.l_max;
    }
    return set;
}

double EigenphaseSet::total_weight() const {
    std::vector<double> w;
    w.reserve(phases.size());
    for (const auto& p : phases) w.push_back(p.weight);
    return kahan_total(w);
}

double EigenphaseSet::tail_weight_bound() const {
    if (!has_tail) return 0.0;
    double sum = 0.0;
    for (int l = tail_l_max + 1; l < tail_l_max + 100000; ++l) {
        const double term = static_cast<double>(multiplicity(d, l)) *
                            std::exp(tail_log_c - tail_rate * l);
        sum += term;
        if (term < 1e-18 * (1.0 + sum)) break;
    }
    return sum;
}

void eigenphase_csv(std::ostream& os, const EigenphaseSet& set) {
    os << "beta,weight,source,h,d\n";
    const char* src = set.source == PhaseSource::central_table ? "central-table" : "dense-2d";
    char buf[160];
    for (const auto& p : set.phases) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%s,%.17g,%d\n", p.beta, p.weight,
                      src, set.h, set.d);
        os << buf;
    }
}

PairingResult pair_measure(const EigenphaseSet& phases, const TestFunction& f,
                           double c_v, double h, int d) {
    if (!(c_v > 0.0)) throw std::invalid_argument("c_V must be positive");
    if (!f.admissible())
        throw std::invalid_argument("pairing requires f(1) = 0");
    KahanC acc;
    for (const auto& p : phases.phases) acc.add(p.weight * f(p.beta));
    const double scale = std::pow(2.0 * M_PI * h, d - 1) / c_v;
    PairingResult out;
    out.value = scale * acc.total();
    if (phases.has_tail)
        out.tail_bound = scale * weighted_norm(f) * phases.tail_weight_bound();
    return out;
}

double count_sector(const EigenphaseSet& phases, double phi0, double phi1) {
    if (!(0.0 < phi0 && phi0 < phi1 && phi1 < 2.0 * M_PI))
        throw std::invalid_argument("sector must satisfy 0 < phi0 < phi1 < 2pi");
    std::vector<double> w;
    for (const auto& p : phases.phases) {
        const double m = mod_2pi(p.beta);
        if (m >= phi0 && m <= phi1) w.push_back(p.weight);
    }
    return kahan_total(w);
}

TraceReport trace_check(const EigenphaseSet& phases, const LaurentPoly& p,
                        double vol_interaction, double h, int d,
                        double vol_std_error) {
    if (std::abs(p.at_one()) > 1e-12)
        throw std::invalid_argument("trace check requires p(1) = 0");
    TraceReport rep;
    rep.poly_label = p.label();
    KahanC acc;
    for (const auto& ph : phases.phases) acc.add(ph.weight * p.eval(ph.beta));
    rep.lhs = acc.total();
    const double scale = std::pow(2.0 * M_PI * h, d - 1);
    rep.rhs = vol_interaction / scale * p.a0().real();
    if (phases.has_tail) {
        const TestFunction f = TestFunction::polynomial(p);
        rep.tail_bound = weighted_norm(f) * phases.tail_weight_bound();
    }
    rep.vol_std_error = vol_std_error / scale * std::abs(p.a0());
    rep.rel_error = std::abs(rep.rhs) > 0.0 ? std::abs(rep.lhs - rep.rhs) / std::abs(rep.rhs)
                                            : std::abs(rep.lhs);
    return rep;
}

namespace {

double rho_taper(double t, double r2, double rstar2) {
    if (t <= r2) return 1.0;
    if (t >= rstar2) return 0.0;
    return 0.5 * (1.0 + std::cos(M_PI * (t - r2) / (rstar2 - r2)));
}

} // namespace

TraceReport cutoff_trace_check(const PhaseTable& table, double rho_r,
                               double rho_r_star, double h, int d) {
    if (!(rho_r > 0.0) || !(rho_r_star > rho_r))
        throw std::invalid_argument("cutoff requires 0 < R < R*");
    TraceReport rep;
    rep.has_cutoff = true;
    rep.rho_r = rho_r;
    rep.rho_r_star = rho_r_star;
    rep.poly_label = "rho-cutoff (z - 1)";
    const double r2 = rho_r * rho_r, rstar2 = rho_r_star * rho_r_star;

    KahanC acc;
    for (const auto& row : table.rows) {
        const double a = rho_taper(h * h * row.l * (row.l + d - 2), r2, rstar2);
        if (a == 0.0) continue;
        acc.add(static_cast<double>(row.mult) * a *
                (std::polar(1.0, row.beta) - cplx(1.0)));
    }
    rep.cutoff_lhs = acc.total();

    // integral of rho(|eta|^2) over the interaction region |eta| <= R_support
    const double R = table.support_radius;
    const int n = 4096;
    double integral = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double s = R * i / n;
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        const double radial = d == 3 ? 2.0 * M_PI * s : 2.0;
        integral += w * radial * rho_taper(s * s, r2, rstar2);
    }
    integral *= R / n / 3.0;
    const double sphere = d == 3 ? 4.0 * M_PI : 2.0 * M_PI;
    rep.cutoff_rhs = -std::pow(2.0 * M_PI * h, -(d - 1)) * sphere * integral;
    rep.cutoff_rel_error = std::abs(rep.cutoff_rhs) > 0.0
                               ? std::abs(rep.cutoff_lhs - rep.cutoff_rhs) / std::abs(rep.cutoff_rhs)
                               : std::abs(rep.cutoff_lhs);
    return rep;
}

EquiReport equidistribution_report(const std::vector<EigenphaseSet>& sets,
                                   double c_v, const SectorGrid& grid) {
    EquiReport rep;
    if (!(c_v > 0.0)) {
        rep.degenerate = true;
        return rep;
    }
    if (grid.margin < 0.1)
        throw std::invalid_argument("sector grid must avoid angle 0 by at least 0.1");
    const double lo = grid.margin, hi = 2.0 * M_PI - grid.margin;
    const double w = (hi - lo) / grid.count;
    for (const auto& set : sets) {
        const double scale = std::pow(2.0 * M_PI * set.h, set.d - 1) / c_v;
        double sup = 0.0;
        for (int s = 0; s < grid.count; ++s) {
            EquiRow row;
            row.h = set.h;
            row.phi0 = lo + s * w;
            row.phi1 = lo + (s + 1) * w;
            row.count = count_sector(set, row.phi0, row.phi1);
            row.normalized = scale * row.count;
            row.target = (row.phi1 - row.phi0) / (2.0 * M_PI);
            row.deviation = row.normalized - row.target;
            sup = std::max(sup, std::abs(row.deviation));
            rep.rows.push_back(row);
        }
        rep.sup_deviation.push_back({set.h, sup});
    }
    return rep;
}

Histogram phase_histogram(const EigenphaseSet& phases, int bins, double c_v) {
    if (bins < 8) throw std::invalid_argument("need at least 8 bins");
    Histogram hist;
    const double width = 2.0 * M_PI / bins;
    hist.edges.resize(bins + 1);
    for (int b = 0; b <= bins; ++b) hist.edges[b] = b * width;
    hist.counts.assign(bins, 0.0);
    for (const auto& p : phases.phases) {
        int b = static_cast<int>(mod_2pi(p.beta) / width);
        if (b >= bins) b = bins - 1;
        hist.counts[b] += p.weight;
    }
    hist.density.assign(bins, 0.0);
    if (c_v > 0.0) {
        const double scale = std::pow(2.0 * M_PI * phases.h, phases.d - 1) / (c_v * width);
        for (int b = 0; b < bins; ++b) hist.density[b] = scale * hist.counts[b];
    }
    return hist;
}

double interaction_volume_central(double support_radius, int d) {
    const double fact = d == 3 ? 2.0 : 1.0; // (d-1)!
    return 2.0 * std::pow(support_radius, d - 1) / fact * std::pow(2.0 * M_PI, d - 1);
}

std::vector<double> dyadic_shell_counts(const EigenphaseSet& phases, double delta,
                                        int j_count) {
    std::vector<double> counts(j_count, 0.0);
    for (const auto& p : phases.phases) {
        const double a = std::abs(p.beta);
        if (a >= delta || a <= 0.0) continue;
        const int j = static_cast<int>(std::floor(std::log2(delta / a))) ;
        if (j >= 0 && j < j_count) counts[j] += p.weight;
    }
    return counts;
}

} // namespace scatlab
