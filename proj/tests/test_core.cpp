#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "scatlab/jsonutil.hpp"
#include "scatlab/potential.hpp"
#include "scatlab/rng.hpp"
#include <nlohmann/json.hpp>

using namespace scatlab;

namespace {

PotentialSpec central_bump(double v0, double radius, int d = 3) {
    PotentialSpec spec;
    spec.kind = PotentialKind::radial_bump;
    spec.dimension = d;
    spec.bumps = {{v0, radius, {0.0, 0.0, 0.0}}};
    return spec;
}

} // namespace

TEST_CASE("zero potential evaluates to zero with empty support") {
    PotentialSpec spec;
    spec.kind = PotentialKind::zero;
    spec.dimension = 3;
    const Potential V = construct_potential(spec);
    CHECK(V.support_radius() == 0.0);
    CHECK(V.value({0.3, -0.2, 0.9}) == 0.0);
    CHECK(V.is_central());
}

TEST_CASE("bump center value is the amplitude") {
    // exp(1 - 1) = 1 at the center
    const Potential V = construct_potential(central_bump(0.4, 1.0));
    CHECK(V.value({0, 0, 0}) == doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("two-bump support radius is max |c| + R") {
    PotentialSpec spec;
    spec.kind = PotentialKind::bump_sum;
    spec.dimension = 3;
    spec.bumps = {{0.3, 0.5, {0.6, 0.0, 0.0}}, {0.3, 0.5, {-0.6, 0.0, 0.0}}};
    const Potential V = construct_potential(spec);
    CHECK(V.support_radius() == doctest::Approx(1.1).epsilon(1e-15));
    CHECK(!V.is_central());
}

TEST_CASE("potential vanishes identically outside the support ball") {
    const Potential V = construct_potential(central_bump(0.7, 1.3));
    CounterRng rng(77, 0);
    for (int i = 0; i < 2000; ++i) {
        // random points at radius >= R
        Vec x{rng.gaussian(), rng.gaussian(), rng.gaussian()};
        const double r = norm(x);
        const double target = V.support_radius() * (1.0 + 2.0 * rng.uniform());
        x = (target / r) * x;
        CHECK(V.value(x) == 0.0);
        CHECK(norm(V.gradient(x)) == 0.0);
    }
}

TEST_CASE("gradient matches central finite differences") {
    PotentialSpec spec;
    spec.kind = PotentialKind::bump_sum;
    spec.dimension = 3;
    spec.bumps = {{0.35, 0.8, {0.3, -0.1, 0.2}}, {-0.25, 0.6, {-0.4, 0.2, 0.0}}};
    const Potential V = construct_potential(spec);
    CounterRng rng(13, 1);
    const double step = 1e-5;
    int checked = 0;
    for (int i = 0; i < 500; ++i) {
        Vec x{(2 * rng.uniform() - 1) * 1.2, (2 * rng.uniform() - 1) * 1.2,
              (2 * rng.uniform() - 1) * 1.2};
        // keep away from the support boundary where V is flat anyway
        if (std::abs(V.value(x)) < 1e-8) continue;
        const Vec g = V.gradient(x);
        for (int c = 0; c < 3; ++c) {
            Vec xp = x, xm = x;
            xp[c] += step;
            xm[c] -= step;
            const double fd = (V.value(xp) - V.value(xm)) / (2 * step);
            const double scale = std::max(1e-6, std::abs(g[c]));
            CHECK(std::abs(fd - g[c]) / scale < 1e-6 * 10);
        }
        ++checked;
    }
    CHECK(checked > 50);
}

TEST_CASE("construction rejects invalid specs") {
    CHECK_THROWS_AS(construct_potential(central_bump(1.0, 1.0)), std::invalid_argument);
    CHECK_THROWS_AS(construct_potential(central_bump(0.5, -1.0)), std::invalid_argument);
    PotentialSpec stacked;
    stacked.kind = PotentialKind::bump_sum;
    stacked.dimension = 3;
    stacked.bumps = {{0.6, 1.0, {0, 0, 0}}, {0.6, 1.0, {0.05, 0, 0}}};
    // each |V0| < 1 but the pointwise sum peaks above 1
    CHECK_THROWS_AS(construct_potential(stacked), std::invalid_argument);
}

TEST_CASE("rescaling to unit energy") {
    EnergyProblem p;
    p.h = 0.2;
    p.E = 4.0;
    p.potential = construct_potential(central_bump(0.4, 1.0));
    const EnergyProblem q = rescale_to_unit_energy(p);
    CHECK(q.E == 1.0);
    CHECK(q.h == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(q.potential.value({0, 0, 0}) == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(q.potential.support_radius() == p.potential.support_radius());

    // identity on E = 1, bit for bit
    const EnergyProblem r = rescale_to_unit_energy(q);
    CHECK(r.h == q.h);
    CHECK(r.potential.value({0.3, 0.1, 0}) == q.potential.value({0.3, 0.1, 0}));

    EnergyProblem bad = p;
    bad.E = -1.0;
    CHECK_THROWS_AS(rescale_to_unit_energy(bad), std::invalid_argument);
}

TEST_CASE("canonical serialization is key-sorted with 17 significant digits") {
    nlohmann::json j;
    j["zeta"] = 1.0 / 3.0;
    j["alpha"] = nlohmann::json::array({1, 2.5});
    j["mid"] = {{"b", 2}, {"a", 1}};
    const std::string s = canonical_dump(j);
    CHECK(s == "{\"alpha\":[1,2.5],\"mid\":{\"a\":1,\"b\":2},"
               "\"zeta\":0.33333333333333331}");
    // round-trip stability: parse and re-dump
    CHECK(canonical_dump(nlohmann::json::parse(s)) == s);
}

TEST_CASE("potential spec JSON round trip") {
    PotentialSpec spec;
    spec.kind = PotentialKind::bump_sum;
    spec.dimension = 2;
    spec.bumps = {{0.3, 0.5, {0.6, 0.1, 0.0}}, {-0.2, 0.4, {-0.5, 0.0, 0.0}}};
    const nlohmann::json j = spec.to_json();
    const PotentialSpec back = PotentialSpec::from_json(j);
    CHECK(back.dimension == 2);
    REQUIRE(back.bumps.size() == 2);
    CHECK(back.bumps[0].amplitude == spec.bumps[0].amplitude);
    CHECK(back.bumps[1].center[0] == spec.bumps[1].center[0]);
    CHECK(canonical_dump(back.to_json()) == canonical_dump(j));
}

TEST_CASE("counter rng is reproducible and stream-independent") {
    CounterRng a(42, 7), b(42, 7), c(42, 8);
    for (int i = 0; i < 100; ++i) {
        const double x = a.uniform();
        CHECK(x == b.uniform());
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
    }
    // different stream differs
    CounterRng a2(42, 7);
    CHECK(a2.uniform() != c.uniform());
}
