#include "scatlab/potential.hpp"

#include <cmath>
#include <stdexcept>

#include "scatlab/rng.hpp"
#include <nlohmann/json.hpp>

namespace scatlab {

namespace {

// profile f(u) = exp(1 - 1/(1-u)) on u = |x-c|^2/R^2 < 1, else 0
double profile(double u) {
    if (u >= 1.0 - 1e-12) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - u));
}

// d f / d u
double profile_du(double u) {
    if (u >= 1.0 - 1e-12) return 0.0;
    const double w = 1.0 - u;
    return -std::exp(1.0 - 1.0 / w) / (w * w);
}

std::string kind_name(PotentialKind k) {
    switch (k) {
        case PotentialKind::zero: return "zero";
        case PotentialKind::radial_bump: return "radial_bump";
        case PotentialKind::bump_sum: return "bump_sum";
    }
    return "zero";
}

PotentialKind kind_from_name(const std::string& s) {
    if (s == "zero") return PotentialKind::zero;
    if (s == "radial_bump") return PotentialKind::radial_bump;
    if (s == "bump_sum") return PotentialKind::bump_sum;
    throw std::invalid_argument("unknown potential kind: " + s);
}

} // namespace

nlohmann::json PotentialSpec::to_json() const {
    nlohmann::json j;
    j["kind"] = kind_name(kind);
    j["dimension"] = dimension;
    auto arr = nlohmann::json::array();
    for (const auto& b : bumps) {
        nlohmann::json jb;
        jb["amplitude"] = b.amplitude;
        jb["radius"] = b.radius;
        std::vector<double> c(b.center.begin(), b.center.begin() + dimension);
        jb["center"] = c;
        arr.push_back(jb);
    }
    j["bumps"] = arr;
    return j;
}

PotentialSpec PotentialSpec::from_json(const nlohmann::json& j) {
    PotentialSpec spec;
    spec.kind = kind_from_name(j.at("kind").get<std::string>());
    spec.dimension = j.at("dimension").get<int>();
    if (j.contains("bumps")) {
        for (const auto& jb : j.at("bumps")) {
            Bump b;
            b.amplitude = jb.at("amplitude").get<double>();
            b.radius = jb.at("radius").get<double>();
            auto c = jb.at("center").get<std::vector<double>>();
            b.center = vec_zero();
            for (std::size_t i = 0; i < c.size() && i < 3; ++i) b.center[i] = c[i];
            spec.bumps.push_back(b);
        }
    }
    return spec;
}

double Potential::value(const Vec& x) const {
    double v = 0.0;
    for (const auto& b : spec_.bumps) {
        const double u = norm2(x - b.center) / (b.radius * b.radius);
        if (u < 1.0) v += b.amplitude * profile(u);
    }
    return v;
}

Vec Potential::gradient(const Vec& x) const {
    Vec g = vec_zero();
    for (const auto& b : spec_.bumps) {
        const Vec r = x - b.center;
        const double R2 = b.radius * b.radius;
        const double u = norm2(r) / R2;
        if (u < 1.0) {
            const double s = b.amplitude * profile_du(u) * 2.0 / R2;
            g = g + s * r;
        }
    }
    return g;
}

bool Potential::is_central() const {
    if (is_zero()) return true;
    for (const auto& b : spec_.bumps)
        if (norm(b.center) > 0.0) return false;
    return true;
}

double Potential::radial_value(double r) const {
    return value({r, 0.0, 0.0});
}

double Potential::radial_derivative(double r) const {
    return gradient({r, 0.0, 0.0})[0];
}

Potential Potential::scaled_amplitudes(double inv_scale) const {
    PotentialSpec s = spec_;
    for (auto& b : s.bumps) b.amplitude *= inv_scale;
    return construct_potential(s);
}

Potential construct_potential(const PotentialSpec& spec) {
    if (spec.dimension != 2 && spec.dimension != 3)
        throw std::invalid_argument("dimension must be 2 or 3");
    if (spec.kind == PotentialKind::zero && !spec.bumps.empty())
        throw std::invalid_argument("zero potential must have no bumps");
    if (spec.kind == PotentialKind::radial_bump && spec.bumps.size() != 1)
        throw std::invalid_argument("radial_bump expects exactly one bump");
    if (spec.kind != PotentialKind::zero && spec.bumps.empty())
        throw std::invalid_argument("bump_sum expects at least one bump");

    Potential pot;
    pot.spec_ = spec;
    double R = 0.0;
    for (auto& b : pot.spec_.bumps) {
        if (!(b.radius > 0.0)) throw std::invalid_argument("bump radius must be positive");
        if (!(std::abs(b.amplitude) < 1.0))
            throw std::invalid_argument("bump amplitude must satisfy |V0| < 1");
        if (spec.dimension == 2) b.center[2] = 0.0;
        R = std::max(R, norm(b.center) + b.radius);
    }
    pot.support_radius_ = R;

    // sup|V| < 1 so that every energy-1 trajectory stays classically allowed.
    // Checked by dense sampling: bump centers plus quasi-random points in B_R.
    if (!pot.spec_.bumps.empty()) {
        double sup = 0.0;
        for (const auto& b : pot.spec_.bumps) sup = std::max(sup, std::abs(pot.value(b.center)));
        CounterRng rng(0x5ca71ab5u, 0);
        for (int i = 0; i < 8192; ++i) {
            Vec x;
            for (int c = 0; c < 3; ++c) x[c] = (2.0 * rng.uniform() - 1.0) * R;
            if (spec.dimension == 2) x[2] = 0.0;
            sup = std::max(sup, std::abs(pot.value(x)));
        }
        if (sup >= 1.0)
            throw std::invalid_argument("pointwise sum violates sup|V| < 1");
    }
    return pot;
}

EnergyProblem rescale_to_unit_energy(const EnergyProblem& problem) {
    if (!(problem.E > 0.0)) throw std::invalid_argument("energy must be positive");
    if (problem.E == 1.0) return problem;
    EnergyProblem out;
    out.h = problem.h / std::sqrt(problem.E);
    out.E = 1.0;
    out.potential = problem.potential.scaled_amplitudes(1.0 / problem.E);
    return out;
}

} // namespace scatlab
