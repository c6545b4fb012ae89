#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "fracint/errors.hpp"
#include "fracint/weights.hpp"

using namespace fracint;
using fixtures::close;

namespace {

FiniteSpace grid(std::size_t n) {
    GenerateParams gp;
    gp.n = n;
    return generate_space(SpaceKind::grid1d, gp, 0);
}

double avg(const FiniteSpace& s, const std::vector<PointId>& b, std::span<const double> a) {
    double num = 0, den = 0;
    for (PointId x : b) {
        num += a[x] * s.mass(x);
        den += s.mass(x);
    }
    return num / den;
}

// A_{p,q} by scanning every enumerated ball directly.
double oracle_apq(const FiniteSpace& s, const Weight& w, double p, double q) {
    const double pc = conjugate_exponent(p);
    const auto wq = power_of(w, q);
    const auto wm = power_of(w, -pc);
    double best = 0;
    for (const auto& b : enumerate_balls(s)) {
        best = std::max(best, avg(s, b.members, wq) * std::pow(avg(s, b.members, wm), q / pc));
    }
    return best;
}

// A_1 in full mode from the brute-force maximal function.
double oracle_a1(const FiniteSpace& s, const Weight& w) {
    std::vector<double> m(s.size(), 0.0);
    for (const auto& b : enumerate_balls(s)) {
        const double a = avg(s, b.members, w);
        for (PointId x : b.members) m[x] = std::max(m[x], a);
    }
    double best = 0;
    for (std::size_t x = 0; x < s.size(); ++x) best = std::max(best, m[x] / w[x]);
    return best;
}

}  // namespace

TEST_CASE("weighted norms") {
    const FiniteSpace s = fixtures::p3();
    const std::vector<double> one{1, 1, 1};
    CHECK(weighted_lp_norm(s, std::vector<double>{1, 1, 0}, one, 2) == doctest::Approx(std::sqrt(2.0)));
    CHECK(weighted_lp_norm(s, std::vector<double>{0, 0, 0}, std::vector<double>{4, 1, 1}, 3) == 0.0);
    CHECK(weighted_lp_norm(s, one, std::vector<double>{4, 1, 1}, 1) == doctest::Approx(6.0));

    CHECK(weak_lorentz_norm(s, std::vector<double>{2, 1, 0}, one, 2) == doctest::Approx(2.0));
    CHECK(weak_lorentz_norm(s, std::vector<double>{2, 1, 0}, one, 1) == doctest::Approx(2.0));
    CHECK(weak_lorentz_norm(s, std::vector<double>{0.7, 0.7, 0.7}, one, 4) ==
          doctest::Approx(0.7 * std::pow(3.0, 0.25)));
    CHECK(weak_lorentz_norm(s, std::vector<double>{0, 0, 0}, one, 2) == 0.0);
}

TEST_CASE("exponent pairs") {
    const auto pq = ExponentPair::make(4.0 / 3, 4);
    CHECK(pq.p_conj == doctest::Approx(4.0));
    CHECK(pq.q_conj == doctest::Approx(4.0 / 3));
    CHECK(pq.r == doctest::Approx(2.0));
    CHECK(pq.s_exp == doctest::Approx(2.0));
    CHECK(std::isinf(ExponentPair::make(1, 2).p_conj));
    CHECK_THROWS_AS(ExponentPair::make(3, 2), ParameterError);
    CHECK_THROWS_AS(ExponentPair::make(0.5, 2), ParameterError);
}

TEST_CASE("constant weight has constant 1") {
    const FiniteSpace s = fixtures::random_space(4, 9);
    const Weight w(s.size(), 3.7);
    for (const auto& spec : {WeightClassSpec::a1(), WeightClassSpec::a1(MaximalMode::centered),
                             WeightClassSpec::ap(2), WeightClassSpec::apq(1.5, 3), WeightClassSpec::a1q(2)}) {
        CHECK(weight_constant(s, w, spec).value == doctest::Approx(1.0));
    }
}

TEST_CASE("P3 A1 and Apq") {
    const FiniteSpace s = fixtures::p3();
    const Weight w{1, 1, 2};
    const auto a1 = weight_constant(s, w, WeightClassSpec::a1());
    CHECK(a1.value == doctest::Approx(1.5));
    REQUIRE(a1.witness_point);
    CHECK(*a1.witness_point == 1);
    CHECK(a1.mode == MaximalMode::full);

    const auto apq = weight_constant(s, w, WeightClassSpec::apq(2, 2));
    const auto ap = weight_constant(s, power_of(w, 2), WeightClassSpec::ap(2));
    CHECK(close(apq.value, ap.value, 1e-12));
    CHECK(close(apq.value, oracle_apq(s, w, 2, 2)));
    CHECK(!apq.witness_point);

    CHECK_THROWS_AS(weight_constant(s, Weight{1, 0, 1}, WeightClassSpec::a1()), ParameterError);
    CHECK_THROWS_AS(weight_constant(s, w, WeightClassSpec::apq(3, 2)), ParameterError);
    CHECK(parse_weight_class("a1q") == WeightClass::a1q);
    CHECK(!parse_weight_class("a2"));
}

TEST_CASE("weight constants match ball-scan oracles") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const FiniteSpace s = fixtures::random_space(seed + 500, 6 + seed % 5);
        Rng rng(seed);
        const Weight w = fixtures::random_positive(rng, s.size(), 0.1, 10);
        const double p = rng.uniform(1.1, 3);
        const double q = p + rng.uniform(0, 3);
        CHECK(close(weight_constant(s, w, WeightClassSpec::apq(p, q)).value, oracle_apq(s, w, p, q), 1e-10));
        CHECK(close(weight_constant(s, w, WeightClassSpec::a1()).value, oracle_a1(s, w), 1e-12));
        CHECK(close(weight_constant(s, w, WeightClassSpec::a1q(q)).value, oracle_a1(s, power_of(w, q)), 1e-10));
        const double centered = weight_constant(s, w, WeightClassSpec::a1(MaximalMode::centered)).value;
        CHECK(centered <= weight_constant(s, w, WeightClassSpec::a1()).value * (1 + 1e-12));
    }
}

TEST_CASE("weight identities hold on random spaces") {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        const FiniteSpace s = fixtures::random_space(seed + 600, 8);
        Rng rng(seed);
        const Weight w = fixtures::random_positive(rng, s.size(), 0.2, 5);
        const double p = rng.uniform(1.05, 3);
        const double q = p + rng.uniform(0, 4);
        const auto e = weight_identity_errors(s, w, ExponentPair::make(p, q));
        CHECK(e.max() <= 1e-10);
        CHECK(weight_identity_errors(s, w, ExponentPair::make(p, q), MaximalMode::centered).max() <= 1e-10);
    }
}

TEST_CASE("power weights") {
    const FiniteSpace s = fixtures::p3();
    const Weight u = power_weight(s, 0.5, 0);
    CHECK(u[0] == doctest::Approx(1.0));
    CHECK(u[1] == doctest::Approx(1.0));
    CHECK(u[2] == doctest::Approx(1.0 / std::sqrt(2.0)));

    const Weight two = power_weight(fixtures::line({0, 1}, {1, 1}), 0.3, 0);
    CHECK(two[0] == doctest::Approx(1.0));
    CHECK(two[1] == doctest::Approx(1.0));

    CHECK(power_weight(grid(4), 0.5, 0)[3] == doctest::Approx(std::pow(0.75, -0.5)));
    CHECK_THROWS_AS(power_weight(s, 0.0, 0), ParameterError);
}

TEST_CASE("epsilon points") {
    const FiniteSpace s = fixtures::p3();
    auto e = epsilon_point(s, 0.5);
    CHECK(e.feasible);
    CHECK(e.point == 0);
    CHECK(e.ratio == doctest::Approx(3.0));
    CHECK(e.radius > 3.0);
    CHECK(e.count == 3);

    e = epsilon_point(s, 0.2);
    CHECK(!e.feasible);
    CHECK(e.best_ratio == doctest::Approx(3.0));

    e = epsilon_point(grid(16), 0.1);
    CHECK(e.feasible);
    CHECK(e.count >= 11);
    CHECK(e.best_ratio == doctest::Approx(16.0));
    CHECK_THROWS_AS(epsilon_point(s, 0.0), ParameterError);
}

TEST_CASE("halving radii") {
    const FiniteSpace s = fixtures::p3();
    const auto r = halving_radii(s, 2, 3.5);
    REQUIRE(r.size() == 2);
    CHECK(r[0] == 3.5);
    CHECK(r[1] == 1.75);

    CHECK(halving_radii(s, 0, 0.5) == std::vector<double>{0.5});
    CHECK_THROWS_AS(halving_radii(s, 0, 0.0), ParameterError);

    const FiniteSpace g = grid(64);
    const auto h = halving_radii(g, 0, 1.0);
    // strict balls on a dyadic grid: mu(B(0, 2^-k)) = 2^-k exactly, so each step skips one level
    CHECK(h == std::vector<double>{1.0, 0.25, 0.0625, 0.015625});
    for (std::size_t i = 1; i < h.size(); ++i) {
        CHECK(h[i] < h[i - 1]);
        CHECK(ball_members(g, 0, h[i]).measure < ball_members(g, 0, h[i - 1]).measure / 2);
    }
}
