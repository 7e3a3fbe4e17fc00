#include "scatlab/classical.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "scatlab/ode.hpp"
#include "scatlab/parallel.hpp"
#include "scatlab/rng.hpp"

namespace scatlab {

IncomingRay::IncomingRay(const Vec& w, const Vec& e) : omega(w), eta(e) {
    if (std::abs(norm(omega) - 1.0) > 1e-12)
        throw std::invalid_argument("incoming direction must be a unit vector");
    if (std::abs(dot(omega, eta)) > 1e-12)
        throw std::invalid_argument("impact vector must be perpendicular to omega");
}

std::string boundary_term_name(BoundaryTerm b) {
    switch (b) {
        case BoundaryTerm::zero: return "zero";
        case BoundaryTerm::half_sum: return "half_sum";
        case BoundaryTerm::eta_prime_only: return "eta_prime_only";
    }
    return "zero";
}

bool line_interacts(const Potential& V, const IncomingRay& ray) {
    for (const auto& b : V.spec().bumps) {
        const Vec rel = b.center - ray.eta;
        const Vec perp = rel - dot(rel, ray.omega) * ray.omega;
        if (norm(perp) < b.radius) return true;
    }
    return false;
}

TrajectoryResult integrate_trajectory(const Potential& V, const IncomingRay& ray,
                                      const SojournOptions& opts, bool record_samples) {
    const double R = V.support_radius();
    const double rho = R + opts.margin;
    const double eta2 = norm2(ray.eta);
    if (eta2 >= rho * rho)
        throw std::invalid_argument("impact vector outside the start sphere");
    const double t0 = -std::sqrt(rho * rho - eta2);
    const double t_budget = opts.t_max_factor * rho;

    // state: x, v, integral of V
    std::array<double, 7> y{};
    for (int i = 0; i < 3; ++i) {
        y[i] = t0 * ray.omega[i] + ray.eta[i];
        y[3 + i] = ray.omega[i];
    }
    y[6] = 0.0;

    auto f = [&V](double, const std::array<double, 7>& s, std::array<double, 7>& ds) {
        const Vec x = {s[0], s[1], s[2]};
        const Vec g = V.gradient(x);
        ds[0] = s[3];
        ds[1] = s[4];
        ds[2] = s[5];
        ds[3] = -0.5 * g[0];
        ds[4] = -0.5 * g[1];
        ds[5] = -0.5 * g[2];
        ds[6] = V.value(x);
    };

    TrajectoryResult out;
    out.t_start = t0;

    // in-plane winding reference frame
    const Vec e1 = ray.omega;
    Vec e2;
    {
        Vec basis[2];
        perp_basis(ray.omega, V.dimension(), basis);
        const double en = norm(ray.eta);
        e2 = en > 0.0 ? (1.0 / en) * ray.eta : basis[0];
    }
    double phi_raw_prev = 0.0; // velocity starts along e1, so atan2 = 0

    if (record_samples) {
        std::array<double, 7> rec;
        rec[0] = t0;
        for (int i = 0; i < 6; ++i) rec[1 + i] = y[i];
        out.samples.push_back(rec);
    }

    auto stop = [&](double t, const std::array<double, 7>& s) -> bool {
        if (t - t0 > t_budget)
            throw TrappedError("flow time exceeded the non-trapping budget");
        const Vec x = {s[0], s[1], s[2]};
        const Vec v = {s[3], s[4], s[5]};
        out.energy_drift = std::max(out.energy_drift, std::abs(norm2(v) + V.value(x) - 1.0));
        const double phi = std::atan2(dot(v, e2), dot(v, e1));
        out.winding += std::remainder(phi - phi_raw_prev, 2.0 * M_PI);
        phi_raw_prev = phi;
        if (record_samples) {
            std::array<double, 7> rec;
            rec[0] = t;
            for (int i = 0; i < 6; ++i) rec[1 + i] = s[i];
            out.samples.push_back(rec);
        }
        return norm2(x) > rho * rho && dot(x, v) > 0.0;
    };

    OdeOptions oopt;
    oopt.rtol = opts.rtol;
    oopt.atol = opts.atol;
    double h_cap = 0.5;
    for (const auto& b : V.spec().bumps) h_cap = std::min(h_cap, 0.25 * b.radius);
    oopt.h_max = h_cap;
    oopt.h_init = 0.1 * h_cap;

    const double t_end = integrate_ode<7>(f, y, t0, t0 + t_budget + 1.0, oopt, stop);
    if (t_end - t0 > t_budget)
        throw TrappedError("flow time exceeded the non-trapping budget");

    out.x_exit = {y[0], y[1], y[2]};
    out.v_exit = {y[3], y[4], y[5]};
    out.t_exit = t_end;
    out.action_v = y[6];
    return out;
}

namespace {

double boundary_correction(BoundaryTerm b, const Vec& eta, const Vec& eta_p,
                           const Vec& omega, const Vec& omega_p) {
    switch (b) {
        case BoundaryTerm::zero:
            return 0.0;
        case BoundaryTerm::half_sum:
            return -0.5 * dot(eta + eta_p, omega_p - omega);
        case BoundaryTerm::eta_prime_only:
            return -dot(eta_p, omega_p - omega);
    }
    return 0.0;
}

} // namespace

ScatterDatum sojourn_map(const Potential& V, const IncomingRay& ray,
                         const SojournOptions& opts) {
    ScatterDatum d{ray, ray.omega, ray.eta, 0.0, false, 0.0};
    if (!line_interacts(V, ray)) return d;

    const TrajectoryResult tr = integrate_trajectory(V, ray, opts);
    const Vec omega_p = normalized(tr.v_exit);
    const double t_out = dot(tr.x_exit, omega_p); // outgoing asymptotic parameter
    const Vec eta_p = tr.x_exit - t_out * omega_p;

    // Regularized action: integral of (1 - V) over the window minus the free
    // time between the asymptotic parameter marks. The clock part telescopes,
    // leaving the interior V integral plus the outgoing parameter shift.
    const double a_reg = (tr.t_exit - tr.t_start) - tr.action_v - (t_out - tr.t_start);
    const double tau = a_reg + boundary_correction(opts.boundary, ray.eta, eta_p,
                                                   ray.omega, omega_p);

    d.omega_out = omega_p;
    d.eta_out = eta_p;
    d.tau = tau;
    d.interacted = true;
    d.energy_drift = tr.energy_drift;
    return d;
}

ScatterDatum sojourn_map_inverse(const Potential& V, const IncomingRay& ray,
                                 const SojournOptions& opts) {
    // time reversal: S^{-1}(w, e) = flip(S(flip(w, e))), flip(w, e) = (-w, e)
    const IncomingRay flipped(-ray.omega, ray.eta);
    ScatterDatum d = sojourn_map(V, flipped, opts);
    ScatterDatum out{ray, -d.omega_out, d.eta_out, d.tau, d.interacted, d.energy_drift};
    return out;
}

double contact_defect(const Potential& V, const IncomingRay& ray, double step,
                      const SojournOptions& opts) {
    if (!(step > 1e-7))
        throw std::invalid_argument("variation step below the integrator noise floor");
    const ScatterDatum center = sojourn_map(V, ray, opts);
    if (!center.interacted)
        return 0.0;

    Vec basis[2];
    const int nb = perp_basis(ray.omega, V.dimension(), basis);

    auto rotated = [&](const Vec& e, double s) {
        const Vec w = std::cos(s) * ray.omega + std::sin(s) * e;
        const double he = dot(ray.eta, e);
        const Vec eta = ray.eta - std::sin(s) * he * ray.omega + (std::cos(s) - 1.0) * he * e;
        return IncomingRay(w, eta);
    };
    auto translated = [&](const Vec& e, double s) {
        return IncomingRay(ray.omega, ray.eta + s * e);
    };

    double defect = 0.0;
    for (int i = 0; i < nb; ++i) {
        for (int mode = 0; mode < 2; ++mode) {
            const auto make = [&](double s) {
                return mode == 0 ? rotated(basis[i], s) : translated(basis[i], s);
            };
            const ScatterDatum dp = sojourn_map(V, make(step), opts);
            const ScatterDatum dm = sojourn_map(V, make(-step), opts);
            const double dtau = (dp.tau - dm.tau) / (2.0 * step);
            const Vec domega_p = (1.0 / (2.0 * step)) * (dp.omega_out - dm.omega_out);
            const double lhs_in = mode == 0 ? dot(ray.eta, basis[i]) : 0.0;
            const double predicted = lhs_in - dot(center.eta_out, domega_p);
            defect = std::max(defect, std::abs(dtau - predicted));
        }
    }
    return defect;
}

IncomingRay sample_ray(const Potential& V, double eta_max, std::uint64_t seed,
                       std::uint64_t index) {
    CounterRng rng(seed, index);
    const int d = V.dimension();
    Vec w;
    if (d == 2) {
        const double a = 2.0 * M_PI * rng.uniform();
        w = {std::cos(a), std::sin(a), 0.0};
    } else {
        const double z = 2.0 * rng.uniform() - 1.0;
        const double a = 2.0 * M_PI * rng.uniform();
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        w = {r * std::cos(a), r * std::sin(a), z};
    }
    Vec basis[2];
    perp_basis(w, d, basis);
    Vec eta;
    if (d == 2) {
        eta = ((2.0 * rng.uniform() - 1.0) * eta_max) * basis[0];
    } else {
        const double r = eta_max * std::sqrt(rng.uniform());
        const double a = 2.0 * M_PI * rng.uniform();
        eta = r * std::cos(a) * basis[0] + r * std::sin(a) * basis[1];
    }
    return IncomingRay(w, eta);
}

LiouvilleEstimate interaction_volume_mc(const Potential& V, std::int64_t samples,
                                        double eta_max, std::uint64_t seed,
                                        unsigned threads) {
    if (eta_max < V.support_radius())
        throw std::invalid_argument("eta_max must cover the support radius");
    if (samples <= 1) throw std::invalid_argument("need at least two samples");

    std::vector<std::uint8_t> hit(static_cast<std::size_t>(samples));
    parallel_for(static_cast<std::size_t>(samples), [&](std::size_t i) {
        const IncomingRay ray = sample_ray(V, eta_max, seed, i);
        hit[i] = line_interacts(V, ray) ? 1 : 0;
    }, threads);

    std::int64_t count = 0;
    for (auto b : hit) count += b;
    const double n = static_cast<double>(samples);
    const double p = static_cast<double>(count) / n;
    const int d = V.dimension();
    const double sphere = d == 2 ? 2.0 * M_PI : 4.0 * M_PI;
    const double ball = d == 2 ? 2.0 * eta_max : M_PI * eta_max * eta_max;
    const double domain = sphere * ball;

    LiouvilleEstimate est;
    est.volume = domain * p;
    est.std_error = domain * std::sqrt(std::max(0.0, p * (1.0 - p) / (n - 1.0)));
    est.samples = samples;
    est.eta_max = eta_max;
    return est;
}

FixedPointEstimate fixed_point_fraction(const Potential& V, int l,
                                        std::int64_t samples, double delta_fix,
                                        std::uint64_t seed,
                                        const SojournOptions& opts,
                                        unsigned threads) {
    if (l == 0) throw std::invalid_argument("l must be nonzero");
    if (samples <= 0) throw std::invalid_argument("need samples > 0");
    const double eta_max = std::max(V.support_radius(), 1e-12);

    // 0 = outside I, 1 = inside and far, 2 = inside and delta-close, 3 = trapped
    std::vector<std::uint8_t> status(static_cast<std::size_t>(samples), 0);
    parallel_for(static_cast<std::size_t>(samples), [&](std::size_t i) {
        const IncomingRay ray = sample_ray(V, eta_max, seed, i);
        if (!line_interacts(V, ray)) return;
        try {
            Vec w = ray.omega, e = ray.eta;
            for (int k = 0; k < std::abs(l); ++k) {
                const IncomingRay cur(w, e);
                const ScatterDatum d = l > 0 ? sojourn_map(V, cur, opts)
                                             : sojourn_map_inverse(V, cur, opts);
                w = d.omega_out;
                e = d.eta_out;
            }
            const double dist = norm(w - ray.omega) + norm(e - ray.eta);
            status[i] = dist < delta_fix ? 2 : 1;
        } catch (const TrappedError&) {
            status[i] = 3;
        }
    }, threads);

    FixedPointEstimate est;
    est.l = l;
    est.delta_fix = delta_fix;
    est.samples = samples;
    std::int64_t inside = 0, close = 0, trapped = 0;
    for (auto s : status) {
        if (s == 1 || s == 2) ++inside;
        if (s == 2) ++close;
        if (s == 3) ++trapped;
    }
    est.samples_interacting = inside;
    est.samples_trapped = trapped;
    est.fraction = inside > 0 ? static_cast<double>(close) / static_cast<double>(inside) : 0.0;
    return est;
}

double scattering_angle_central(const Potential& V, double b,
                                const SojournOptions& opts) {
    if (!V.is_central()) throw std::invalid_argument("potential must be central");
    if (b < 0.0) throw std::invalid_argument("impact parameter must be nonnegative");
    if (b == 0.0 || b >= V.support_radius()) return 0.0;

    const Vec omega = {1.0, 0.0, 0.0};
    const Vec eta = {0.0, b, 0.0};
    const TrajectoryResult tr = integrate_trajectory(V, IncomingRay(omega, eta), opts);
    return tr.winding;
}

BoundaryCalibration calibrate_boundary_term(const Potential& V, int rays,
                                            double step, std::uint64_t seed,
                                            const SojournOptions& base) {
    BoundaryCalibration cal;
    cal.rays = rays;
    cal.step = step;
    const double eta_max = std::max(V.support_radius(), 1e-12);

    std::vector<IncomingRay> set;
    std::uint64_t idx = 0;
    while (static_cast<int>(set.size()) < rays && idx < 100000ull * rays + 1000ull) {
        IncomingRay r = sample_ray(V, eta_max, seed, idx++);
        if (line_interacts(V, r)) set.push_back(r);
    }

    const BoundaryTerm candidates[3] = {BoundaryTerm::zero, BoundaryTerm::half_sum,
                                        BoundaryTerm::eta_prime_only};
    double best = std::numeric_limits<double>::infinity();
    for (int c = 0; c < 3; ++c) {
        SojournOptions o = base;
        o.boundary = candidates[c];
        std::vector<double> defects(set.size());
        parallel_for(set.size(), [&](std::size_t i) {
            try {
                defects[i] = contact_defect(V, set[i], step, o);
            } catch (const TrappedError&) {
                defects[i] = std::numeric_limits<double>::infinity();
            }
        });
        std::sort(defects.begin(), defects.end());
        const double med = defects.empty() ? 0.0 : defects[defects.size() / 2];
        cal.median_defect[c] = med;
        if (med < best) {
            best = med;
            cal.chosen = candidates[c];
        }
    }
    return cal;
}

void write_scatter_csv(std::ostream& os, const std::vector<ScatterDatum>& data, int dim) {
    auto col = [&](const std::string& base) {
        std::string s;
        for (int i = 0; i < dim; ++i) s += base + std::to_string(i) + ",";
        return s;
    };
    os << col("omega") << col("eta") << col("omega_p") << col("eta_p")
       << "tau,interacted,energy_drift\n";
    char buf[64];
    auto emit = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf << ",";
    };
    for (const auto& d : data) {
        for (int i = 0; i < dim; ++i) emit(d.incoming.omega[i]);
        for (int i = 0; i < dim; ++i) emit(d.incoming.eta[i]);
        for (int i = 0; i < dim; ++i) emit(d.omega_out[i]);
        for (int i = 0; i < dim; ++i) emit(d.eta_out[i]);
        emit(d.tau);
        os << (d.interacted ? 1 : 0) << ",";
        std::snprintf(buf, sizeof buf, "%.17g", d.energy_drift);
        os << buf << "\n";
    }
}

} // namespace scatlab
