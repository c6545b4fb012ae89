#include <cmath>
#include <limits>

#include "doctest.h"
#include "fixtures.hpp"
#include "fracint/errors.hpp"
#include "fracint/operators.hpp"
#include "fracint/parallel.hpp"
#include "fracint/weights.hpp"

using namespace fracint;
using fixtures::close;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

// Maximal function by direct membership over every (centre, distance) ball.
std::vector<double> brute_maximal(const FiniteSpace& s, const std::vector<double>& f, bool centered) {
    const std::size_t n = s.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t y = 0; y < n; ++y) {
            const double r = s.dist(c, y) * (1 + 1e-9) + 1e-300;
            double num = 0, den = 0;
            std::vector<bool> in(n);
            for (std::size_t z = 0; z < n; ++z) {
                in[z] = s.dist(c, z) < r;
                if (in[z]) {
                    num += std::abs(f[z]) * s.mass(z);
                    den += s.mass(z);
                }
            }
            for (std::size_t x = 0; x < n; ++x) {
                if (in[x] && (!centered || x == c)) out[x] = std::max(out[x], num / den);
            }
        }
    }
    return out;
}

}  // namespace

TEST_CASE("P3 kernel values") {
    const FiniteSpace s = fixtures::p3();
    CHECK(kernel_gamma(s, 0.5, 0, 2) == doctest::Approx(kInvSqrt2));
    CHECK(kernel_gamma(s, 0.5, 0, 0) == 1.0);
    CHECK(kernel_gamma(s, 0.5, 2, 1) == 1.0);
    CHECK(kernel_gamma(s, 0.5, 1, 2) == doctest::Approx(kInvSqrt2));
    CHECK_THROWS_AS(kernel_gamma(s, 1.0, 0, 1), ParameterError);
    CHECK_THROWS_AS(kernel_gamma(s, 0.0, 0, 1), ParameterError);
}

TEST_CASE("P3 T_gamma") {
    const FiniteSpace s = fixtures::p3();
    OperatorParams op;
    op.gamma = 0.5;
    const auto tf = apply_fractional(s, FractionalKind::t_gamma, op, std::vector<double>{1, 1, 1});
    for (double v : tf) CHECK(v == doctest::Approx(2 + kInvSqrt2));
    const auto t3 = apply_fractional(s, FractionalKind::t_gamma, op, std::vector<double>{0, 0, 1});
    CHECK(t3[0] == doctest::Approx(kInvSqrt2));
    CHECK(t3[1] == doctest::Approx(kInvSqrt2));
    CHECK(t3[2] == doctest::Approx(1.0));
    const auto t0 = apply_fractional(s, FractionalKind::t_gamma, op, std::vector<double>{0, 0, 0});
    for (double v : t0) CHECK(v == 0.0);
    CHECK_THROWS_AS(apply_fractional(s, FractionalKind::t_gamma, op, std::vector<double>{1, 1}), ParameterError);
}

TEST_CASE("variant operators exclude the diagonal") {
    const FiniteSpace s = fixtures::p3();
    OperatorParams op;
    op.s = 1.0;
    op.alpha = 1.0;
    const std::vector<double> f{1, 2, 4};
    const auto ri = apply_fractional(s, FractionalKind::riesz_s, op, f);
    CHECK(ri[0] == doctest::Approx(2.0 / 1 + 4.0 / 3));
    CHECK(ri[2] == doctest::Approx(1.0 / 3 + 2.0 / 2));
    const auto fr = apply_fractional(s, FractionalKind::frak_alpha, op, f);
    // y=1: rho=1, mu(B(0,1))=1; y=3: rho=3, mu(B(0,3))=2
    CHECK(fr[0] == doctest::Approx(1.0 * 2 / 1 + 3.0 * 4 / 2));
    op.s = -1.0;
    CHECK_THROWS_AS(apply_fractional(s, FractionalKind::riesz_s, op, f), ParameterError);
    op.alpha = 0.0;
    CHECK_THROWS_AS(apply_fractional(s, FractionalKind::frak_alpha, op, f), ParameterError);
}

TEST_CASE("two forms of T_gamma agree") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const FiniteSpace s = fixtures::random_space(seed, 12);
        Rng rng(seed);
        const auto f = fixtures::random_positive(rng, s.size());
        const double gamma = rng.uniform(0.05, 0.95);
        OperatorParams op;
        op.gamma = gamma;
        const auto full = apply_fractional(s, FractionalKind::t_gamma, op, f);
        const auto parts = t_gamma_parts(s, gamma, f);
        for (std::size_t x = 0; x < s.size(); ++x) {
            CHECK(close(full[x], parts.off_diagonal[x] + parts.atom[x]));
            CHECK(close(parts.atom[x], f[x] * std::pow(s.mass(x), gamma)));
        }
    }
}

TEST_CASE("P3 maximal function") {
    const FiniteSpace s = fixtures::p3();
    const std::vector<double> f{0, 0, 1};
    std::vector<MaximalWitness> wit;
    const auto full = maximal(s, f, MaximalMode::full, &wit);
    CHECK(full[0] == doctest::Approx(1.0 / 3));
    CHECK(full[1] == doctest::Approx(0.5));
    CHECK(full[2] == 1.0);
    CHECK(s.shell_ends(wit[1].center)[wit[1].shell] == 2);
    const auto cen = maximal(s, f, MaximalMode::centered);
    CHECK(cen[1] == doctest::Approx(1.0 / 3));
    for (MaximalMode m : {MaximalMode::full, MaximalMode::centered}) {
        const auto c = maximal(s, std::vector<double>{2.5, 2.5, 2.5}, m);
        for (double v : c) CHECK(v == doctest::Approx(2.5));
    }
    CHECK(parse_maximal_mode("full") == MaximalMode::full);
    CHECK(!parse_maximal_mode("uncentred"));
}

TEST_CASE("maximal function matches brute force") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const FiniteSpace s = fixtures::random_space(seed + 100, 4 + seed);
        Rng rng(seed);
        std::vector<double> f(s.size());
        for (double& v : f) v = rng.uniform(-5, 5);
        const auto full = maximal(s, f, MaximalMode::full);
        const auto cen = maximal(s, f, MaximalMode::centered);
        const auto bf = brute_maximal(s, f, false);
        const auto bc = brute_maximal(s, f, true);
        for (std::size_t x = 0; x < s.size(); ++x) {
            CHECK(close(full[x], bf[x]));
            CHECK(close(cen[x], bc[x]));
            CHECK(cen[x] <= full[x]);
        }
    }
}

TEST_CASE("P3 sublevel sets") {
    const FiniteSpace s = fixtures::p3();
    auto r = sublevel_set(s, 0, 0.5);
    CHECK(r.members == std::vector<PointId>{0});
    CHECK(r.shape == SublevelShape::singleton);
    CHECK(r.r_y == 0.0);

    r = sublevel_set(s, 0, 1.5);
    CHECK(r.members == std::vector<PointId>{0, 1});
    CHECK(r.shape == SublevelShape::closed_ball);
    CHECK(r.r_y == 1.0);
    CHECK(r.measure == 2.0);
    CHECK(r.measure <= doubling_constant(s).c_mu * 1.5);

    r = sublevel_set(s, 0, 10.0);
    CHECK(r.members == std::vector<PointId>{0, 1, 2});
    CHECK(r.shape == SublevelShape::whole_space);
    CHECK(std::isinf(r.r_y));
    CHECK(r.measure == 3.0);

    CHECK_THROWS_AS(sublevel_set(s, 0, 0.0), ParameterError);
    CHECK(to_string(SublevelShape::open_ball) == "open_ball");
}

TEST_CASE("sublevel sets match direct membership") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const FiniteSpace s = fixtures::random_space(seed + 200, 9);
        for (std::size_t y = 0; y < s.size(); ++y) {
            for (double t : {0.05, 0.3, 1.0, 2.0, 5.0, 12.0, 40.0, 100.0}) {
                const auto r = sublevel_set(s, y, t);
                std::vector<PointId> direct;
                for (std::size_t x = 0; x < s.size(); ++x) {
                    const double m = x == y ? 0.0 : s.ball_measure(y, s.dist(y, x));
                    if (m < t) direct.push_back(x);
                }
                CHECK(r.members == direct);
                double meas = 0;
                for (PointId x : direct) meas += s.mass(x);
                CHECK(close(r.measure, meas));
                CHECK((r.shape == SublevelShape::singleton) == (r.r_y == 0.0));
                CHECK((r.shape == SublevelShape::whole_space) == std::isinf(r.r_y));
            }
        }
    }
}

TEST_CASE("P3 kernel weak norms") {
    const FiniteSpace s = fixtures::p3();
    CHECK(kernel_weak_norm(s, 0.5, 0, std::vector<double>{1, 1, 1}) == doctest::Approx(std::sqrt(2.0)));
    CHECK(kernel_weak_norm(s, 0.5, 0, std::vector<double>{4, 1, 1}) == doctest::Approx(std::sqrt(5.0)));
    CHECK(kernel_weak_norm(fixtures::single(), 0.3, 0, std::vector<double>{1}) == doctest::Approx(1.0));
}

TEST_CASE("kernel weak norm equals the Lorentz norm of the column") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const FiniteSpace s = fixtures::random_space(seed + 300, 10);
        Rng rng(seed);
        const auto u = fixtures::random_positive(rng, s.size());
        const double gamma = rng.uniform(0.1, 0.9);
        for (std::size_t y = 0; y < s.size(); ++y) {
            std::vector<double> col(s.size());
            for (std::size_t x = 0; x < s.size(); ++x) col[x] = kernel_gamma(s, gamma, x, y);
            CHECK(close(kernel_weak_norm(s, gamma, y, u), weak_lorentz_norm(s, col, u, 1.0 / (1.0 - gamma))));
        }
    }
}

TEST_CASE("results do not depend on the thread count") {
    const FiniteSpace s = fixtures::random_space(7, 60);
    Rng rng(3);
    const auto f = fixtures::random_positive(rng, s.size());
    OperatorParams op;
    op.gamma = 0.4;
    set_thread_count(1);
    const auto a = apply_fractional(s, FractionalKind::t_gamma, op, f);
    const auto ma = maximal(s, f, MaximalMode::full);
    set_thread_count(4);
    const auto b = apply_fractional(s, FractionalKind::t_gamma, op, f);
    const auto mb = maximal(s, f, MaximalMode::full);
    set_thread_count(1);
    CHECK(a == b);
    CHECK(ma == mb);
}
