#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "fracint/errors.hpp"
#include "fracint/space.hpp"

using namespace fracint;
using fixtures::close;

namespace {

std::set<std::vector<PointId>> brute_balls(const FiniteSpace& s) {
    std::set<std::vector<PointId>> out;
    const std::size_t n = s.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<double> radii;
        for (std::size_t y = 0; y < n; ++y) {
            radii.push_back(s.dist(c, y) * (1 + 1e-9) + 1e-300);
        }
        for (double r : radii) {
            std::vector<PointId> m;
            for (std::size_t y = 0; y < n; ++y) {
                if (s.dist(c, y) < r) m.push_back(y);
            }
            out.insert(m);
        }
    }
    return out;
}

double brute_a0(const FiniteSpace& s) {
    const std::size_t n = s.size();
    double a0 = 1.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) {
                const double den = s.dist(i, k) + s.dist(k, j);
                if (den > 0) a0 = std::max(a0, s.dist(i, j) / den);
            }
    return a0;
}

double direct_measure(const FiniteSpace& s, PointId c, double r) {
    double m = 0.0;
    for (std::size_t y = 0; y < s.size(); ++y) {
        if (s.dist(c, y) < r) m += s.mass(y);
    }
    return m;
}

// Doubling constant by dense radius sampling around every breakpoint.
double brute_doubling(const FiniteSpace& s) {
    double best = 1.0;
    for (std::size_t c = 0; c < s.size(); ++c) {
        std::vector<double> probes;
        for (std::size_t y = 0; y < s.size(); ++y) {
            for (double d : {s.dist(c, y), s.dist(c, y) / 2}) {
                for (double f : {1 - 1e-7, 1 + 1e-7}) probes.push_back(d * f);
            }
        }
        for (double r : probes) {
            if (r <= 0) continue;
            best = std::max(best, direct_measure(s, c, 2 * r) / direct_measure(s, c, r));
        }
    }
    return best;
}

}  // namespace

TEST_CASE("P3 geometry") {
    const FiniteSpace s = fixtures::p3();
    CHECK(s.a0() == 1.0);
    const auto b1 = ball_members(s, 0, 1.0);
    CHECK(b1.members == std::vector<PointId>{0});
    CHECK(b1.measure == 1.0);
    const auto b2 = ball_members(s, 0, 1.5);
    CHECK(b2.members == std::vector<PointId>{0, 1});
    CHECK(b2.measure == 2.0);
    CHECK(ball_members(s, 1, 0.0).members.empty());
    CHECK(ball_members(s, 1, 0.0).measure == 0.0);

    const DoublingResult d = doubling_constant(s);
    CHECK(d.c_mu == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(d.c_mu_exp == doctest::Approx(std::log2(3.0)));
    CHECK(d.witness_center == 2);
    CHECK(d.witness_radius > 1.5);
    CHECK(d.witness_radius < 2.0);
    CHECK(ball_ratio_supremum(s) == 3.0);
}

TEST_CASE("P3 has exactly six balls") {
    const FiniteSpace s = fixtures::p3();
    const auto balls = enumerate_balls(s);
    std::set<std::vector<PointId>> got;
    for (const auto& b : balls) got.insert(b.members);
    CHECK(balls.size() == 6);
    const std::set<std::vector<PointId>> expected{{0}, {1}, {2}, {0, 1}, {1, 2}, {0, 1, 2}};
    CHECK(got == expected);
    CHECK(got.count({0, 2}) == 0);
}

TEST_CASE("small enumerations") {
    GenerateParams gp;
    gp.n = 2;
    CHECK(enumerate_balls(generate_space(SpaceKind::grid1d, gp, 0)).size() == 3);
    CHECK(enumerate_balls(fixtures::single()).size() == 1);
    CHECK(doubling_constant(fixtures::single(2.0)).c_mu == 1.0);
    CHECK(ball_ratio_supremum(fixtures::single()) == 1.0);
}

TEST_CASE("validation errors name the offending data") {
    CHECK_THROWS_AS(FiniteSpace::create({0, 0, 0, 0}, {1, 1}), ValidationError);
    CHECK_THROWS_AS(FiniteSpace::create({0, 1, 2, 0}, {1, 1}), ValidationError);
    CHECK_THROWS_AS(FiniteSpace::create({0, 1, 1, 0}, {1, 0}), ValidationError);
    CHECK_THROWS_AS(FiniteSpace::create({0, 1, 1, 0}, {1, -1}), ValidationError);
    CHECK_THROWS_AS(FiniteSpace::create({1, 1, 1, 0}, {1, 1}), ValidationError);
    try {
        FiniteSpace::create({0, 0, 0, 0}, {1, 1});
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find('0') != std::string::npos);
        CHECK(std::string(e.what()).find('1') != std::string::npos);
    }
    SpaceOptions opt;
    opt.a0_declared = 0.5;
    CHECK_THROWS_AS(FiniteSpace::create({0, 1, 1, 0}, {1, 1}, opt), ValidationError);
}

TEST_CASE("generators") {
    GenerateParams gp;
    gp.n = 4;
    const FiniteSpace g = generate_space(SpaceKind::grid1d, gp, 0);
    REQUIRE(g.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(g.mass(i) == 0.25);
        CHECK(g.dist(0, i) == doctest::Approx(0.25 * i));
    }
    CHECK(g.a0() == 1.0);

    const FiniteSpace sf = snowflake(g, 0.5);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) CHECK(close(sf.dist(i, j), std::sqrt(g.dist(i, j))));
    CHECK(sf.a0() == doctest::Approx(1.0));

    gp.n = 2;
    const FiniteSpace lat = generate_space(SpaceKind::lattice1d, gp, 0);
    CHECK(lat.size() == 5);
    CHECK(lat.total_mass() == 5.0);
    CHECK(lat.dist(0, 4) == 4.0);

    gp.n = 3;
    gp.m = 4;
    const FiniteSpace dy = generate_space(SpaceKind::dyadic_line, gp, 0);
    CHECK(dy.size() == 7);
    CHECK(dy.mass(0) == 0.25);
    CHECK(dy.dist(0, 6) == doctest::Approx(1.5));

    const FiniteSpace tree = generate_space(SpaceKind::cantor_tree, gp, 0);
    CHECK(tree.size() == 8);
    CHECK(tree.total_mass() == doctest::Approx(1.0));
    CHECK(tree.dist(0, 1) < tree.dist(0, 2));
    CHECK(tree.dist(0, 2) < tree.dist(0, 4));

    gp.n = 16;
    gp.base = SpaceKind::grid1d;
    const FiniteSpace pert = generate_space(SpaceKind::perturbed, gp, 42);
    const FiniteSpace pert2 = generate_space(SpaceKind::perturbed, gp, 42);
    for (std::size_t i = 0; i < 16; ++i) {
        CHECK(pert.mass(i) >= 1.0 / 16);
        CHECK(pert.mass(i) <= 2.0 / 16);
        CHECK(pert.mass(i) == pert2.mass(i));
    }

    gp.n = 1;
    CHECK_THROWS_AS(generate_space(SpaceKind::grid1d, gp, 0), ParameterError);
    gp.n = 4;
    gp.epsilon = 1.5;
    CHECK_THROWS_AS(generate_space(SpaceKind::snowflake, gp, 0), ParameterError);
    gp.epsilon = 0.5;
    gp.factor_lo = 0.5;
    CHECK_THROWS_AS(generate_space(SpaceKind::perturbed, gp, 0), ParameterError);
}

TEST_CASE("ball ratio on grids") {
    double prev = 0.0;
    for (std::size_t n : {2u, 5u, 16u, 40u}) {
        GenerateParams gp;
        gp.n = n;
        const double r = ball_ratio_supremum(generate_space(SpaceKind::grid1d, gp, 0));
        CHECK(r == doctest::Approx(static_cast<double>(n)));
        CHECK(r >= prev);
        prev = r;
    }
}

TEST_CASE("Ahlfors constants") {
    GenerateParams gp;
    gp.n = 100;
    const auto g = ahlfors_constants(generate_space(SpaceKind::grid1d, gp, 0), 1.0, 0.02, 1.0);
    CHECK(g.upper >= 0.5);
    CHECK(g.upper <= 2.0);
    CHECK(g.lower >= 0.5);
    CHECK(g.lower <= 2.0);
    CHECK(g.lower <= g.upper);

    gp.n = 8;
    const auto l = ahlfors_constants(generate_space(SpaceKind::lattice1d, gp, 0), 1.0, 1.5, 8.0);
    CHECK(l.upper <= 2.0);
    CHECK(l.lower >= 0.5);

    const auto one = ahlfors_constants(fixtures::single(3.0), 1.0, 0.5, 2.0);
    CHECK(one.upper == doctest::Approx(1.5));
    CHECK(one.lower == doctest::Approx(1.5));

    CHECK_THROWS_AS(ahlfors_constants(fixtures::p3(), 1.0, 1.2, 1.8), ParameterError);
}

TEST_CASE("random spaces agree with brute-force oracles") {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        const FiniteSpace s = fixtures::random_space(seed, 3 + seed % 7);
        CHECK(close(s.a0(), brute_a0(s)));
        CHECK(doubling_constant(s).c_mu == doctest::Approx(brute_doubling(s)).epsilon(1e-12));
        const auto balls = enumerate_balls(s);
        std::set<std::vector<PointId>> got;
        for (const auto& b : balls) got.insert(b.members);
        CHECK(got.size() == balls.size());
        CHECK(got == brute_balls(s));
        for (const auto& b : balls) {
            CHECK(ball_members(s, b.center, b.radius).members == b.members);
        }
    }
}

TEST_CASE("doubling constant is reproducible") {
    GenerateParams gp;
    gp.n = 8;
    const FiniteSpace s = generate_space(SpaceKind::lattice1d, gp, 0);
    const auto a = doubling_constant(s);
    const auto b = doubling_constant(s);
    CHECK(a.c_mu >= 1.0);
    CHECK(a.c_mu == b.c_mu);
    CHECK(a.witness_center == b.witness_center);
}

TEST_CASE("atoms are singleton balls") {
    const FiniteSpace s = fixtures::random_space(99, 9);
    for (std::size_t x = 0; x < s.size(); ++x) {
        const double r = s.sorted_distances(x)[1];
        CHECK(ball_members(s, x, r).members == std::vector<PointId>{x});
    }
}

TEST_CASE("validate_space reports consistent stats") {
    const FiniteSpace s = fixtures::p3();
    const SpaceStats st = validate_space(s);
    CHECK(st.a0 == 1.0);
    CHECK(st.c_mu_doubling == doctest::Approx(3.0));
    CHECK(st.ball_ratio_sup == 3.0);
    CHECK(st.ahlfors_lower <= st.ahlfors_upper);
    for (double eps : {0.25, 0.5, 1.0}) {
        CHECK_NOTHROW(validate_space(snowflake(s, eps)));
    }
}
