#include "scatlab/partialwave.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "scatlab/bessel.hpp"
#include "scatlab/parallel.hpp"
#include <nlohmann/json.hpp>

namespace scatlab {

double wrap_pm_pi(double angle) {
    double w = std::remainder(angle, 2.0 * M_PI);
    if (w <= -M_PI) w = M_PI;
    return w;
}

RadialProfile RadialProfile::from_potential(const Potential& V) {
    if (!V.is_central())
        throw std::invalid_argument("radial solver requires a central potential");
    RadialProfile p;
    p.value = [V](double r) { return V.radial_value(r); };
    p.support_radius = V.support_radius();
    double vmin = 0.0;
    for (const auto& b : V.spec().bumps) vmin = std::min(vmin, b.amplitude);
    p.min_value = vmin;
    return p;
}

namespace {

// radius where the centrifugal barrier alone gives `efolds` of suppression
// between r and the turning point of sqrt(nt^2/r^2 - qmax)
double barrier_start_radius(double nt, double qmax, double efolds) {
    if (nt <= 0.0 || qmax <= 0.0) return 0.0;
    const double target = efolds / nt;
    // solve alpha - tanh(alpha) = target, monotone increasing in alpha
    double lo = 1e-8, hi = 3.0;
    while (hi - std::tanh(hi) < target) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid - std::tanh(mid) < target)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-14 * hi) break;
    }
    const double alpha = 0.5 * (lo + hi);
    const double gamma = 1.0 / std::cosh(alpha);
    return gamma * nt / std::sqrt(qmax);
}

} // namespace

double radial_delta(const RadialProfile& V, double h, int l, int d,
                    const RadialSolveOptions& opts) {
    if (!(h > 0.0)) throw std::invalid_argument("h must be positive");
    if (l < 0) throw std::invalid_argument("l must be nonnegative");
    if (d != 2 && d != 3) throw std::invalid_argument("d must be 2 or 3");
    const double R = V.support_radius;
    if (R <= 0.0) return 0.0;

    const double nu = l + 0.5 * (d - 2);
    const double k = 1.0 / h;
    const double nt2 = nu * nu - 0.25;

    double r_start = 1e-8;
    if (nt2 > 0.0) {
        const double qmax = (1.0 - std::min(0.0, V.min_value)) / (h * h);
        r_start = std::max(r_start,
                           barrier_start_radius(std::sqrt(nt2), qmax, opts.efold_cap));
    }
    if (r_start >= R) return 0.0; // channel suppressed beyond representable size

    // segment the integration range at profile breakpoints
    std::vector<double> edges{r_start};
    for (double b : V.breakpoints)
        if (b > r_start && b < R) edges.push_back(b);
    edges.push_back(R);
    std::sort(edges.begin(), edges.end());

    const double step_target = h / opts.n_sub;
    double delta = 0.0;

    auto rhs = [&](double r, double dl) {
        const double v = V.value(r);
        if (v == 0.0) return 0.0;
        const RiccatiPair rb = riccati_bessel(nu, k * r);
        const double t = std::cos(dl) * rb.s + std::sin(dl) * rb.c;
        return -(v / h) * t * t;
    };

    for (std::size_t seg = 0; seg + 1 < edges.size(); ++seg) {
        const double a = edges[seg], b = edges[seg + 1];
        const int n = std::max(1, static_cast<int>(std::ceil((b - a) / step_target)));
        const double dr = (b - a) / n;
        for (int i = 0; i < n; ++i) {
            const double r = a + i * dr;
            const double k1 = rhs(r, delta);
            const double k2 = rhs(r + 0.5 * dr, delta + 0.5 * dr * k1);
            const double k3 = rhs(r + 0.5 * dr, delta + 0.5 * dr * k2);
            const double k4 = rhs(r + dr, delta + dr * k3);
            delta += dr / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
    }
    return delta;
}

double radial_phase_shift(const Potential& V, double h, int l, int d,
                          const RadialSolveOptions& opts) {
    const double delta = radial_delta(RadialProfile::from_potential(V), h, l, d, opts);
    return wrap_pm_pi(2.0 * delta);
}

long long multiplicity(int d, int l) {
    if (l < 0) throw std::invalid_argument("l must be nonnegative");
    if (d != 2 && d != 3) throw std::invalid_argument("d must be 2 or 3");
    auto binom = [](long long n, int k) -> long long {
        if (n < k) return 0;
        if (k == 1) return n;
        return n * (n - 1) / 2; // k == 2
    };
    return binom(l + d - 1, d - 1) - binom(l + d - 3, d - 1);
}

PhaseTable phase_table(const Potential& V, double h, int d, int l_max,
                       const RadialSolveOptions& opts, unsigned threads) {
    const double R = V.support_radius();
    const int l_floor = static_cast<int>(std::ceil(2.0 * R / h));
    if (l_max < 0) l_max = l_floor + 10;
    if (l_max < l_floor)
        throw std::invalid_argument("L_max must cover the decaying band l >= 2R/h");

    PhaseTable table;
    table.h = h;
    table.d = d;
    table.l_max = l_max;
    table.support_radius = R;
    table.rows.resize(l_max + 1);

    const RadialProfile prof = V.is_zero()
        ? RadialProfile{[](double) { return 0.0; }, 0.0, {}, 0.0}
        : RadialProfile::from_potential(V);

    std::vector<std::string> failures(l_max + 1);
    parallel_for(static_cast<std::size_t>(l_max + 1), [&](std::size_t li) {
        const int l = static_cast<int>(li);
        PhaseRow row;
        row.l = l;
        row.nu = l + 0.5 * (d - 2);
        row.mult = multiplicity(d, l);
        try {
            row.delta_total = radial_delta(prof, h, l, d, opts);
            row.beta = wrap_pm_pi(2.0 * row.delta_total);
            row.abs_s_minus_1 = std::abs(std::polar(1.0, row.beta) - std::complex<double>(1.0, 0.0));
        } catch (const std::exception& e) {
            failures[li] = e.what();
            row.delta_total = row.beta = row.abs_s_minus_1 = 0.0;
        }
        table.rows[li] = row;
    }, threads);

    for (int li = 0; li <= l_max; ++li)
        if (!failures[li].empty())
            throw std::runtime_error("phase table row l=" + std::to_string(li) +
                                     " failed: " + failures[li]);

    // least-squares fit of log|e^{i beta} - 1| vs l over the decaying band
    const int onset = static_cast<int>(std::ceil(1.2 * R / h));
    table.tail.onset_l = onset;
    std::vector<std::pair<double, double>> pts;
    for (const auto& row : table.rows)
        if (row.l >= onset && row.abs_s_minus_1 > 1e-280)
            pts.push_back({static_cast<double>(row.l), std::log(row.abs_s_minus_1)});
    table.tail.points = static_cast<int>(pts.size());
    if (pts.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
        for (auto& [x, y] : pts) {
            sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
        }
        const double n = static_cast<double>(pts.size());
        const double vx = sxx - sx * sx / n;
        const double vy = syy - sy * sy / n;
        const double cxy = sxy - sx * sy / n;
        table.tail.slope = cxy / vx;
        table.tail.intercept = (sy - table.tail.slope * sx) / n;
        table.tail.correlation = vy > 0 ? cxy / std::sqrt(vx * vy) : 0.0;
    }
    return table;
}

void phase_table_csv(std::ostream& os, const PhaseTable& table) {
    os << "h,d,l,nu,beta,d_l,abs_S_minus_1\n";
    char buf[340];
    for (const auto& r : table.rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%d,%d,%.17g,%.17g,%lld,%.17g\n",
                      table.h, table.d, r.l, r.nu, r.beta, r.mult, r.abs_s_minus_1);
        os << buf;
    }
}

nlohmann::json phase_table_meta_json(const PhaseTable& table) {
    nlohmann::json j;
    j["h"] = table.h;
    j["d"] = table.d;
    j["l_max"] = table.l_max;
    j["support_radius"] = table.support_radius;
    j["tail_fit"] = {{"onset_l", table.tail.onset_l},
                     {"points", table.tail.points},
                     {"slope", table.tail.slope},
                     {"intercept", table.tail.intercept},
                     {"correlation", table.tail.correlation}};
    return j;
}

PhaseTable phase_table_from_csv(std::istream& is) {
    PhaseTable table;
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("empty phase table csv");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        PhaseRow row;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        ss >> table.h >> table.d >> row.l >> row.nu >> row.beta >> row.mult >>
            row.abs_s_minus_1;
        if (ss.fail()) throw std::runtime_error("malformed phase table row");
        row.delta_total = 0.5 * row.beta;
        table.rows.push_back(row);
    }
    table.l_max = table.rows.empty() ? 0 : table.rows.back().l;
    return table;
}

} // namespace scatlab
