#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fracint/operators.hpp"
#include "fracint/space.hpp"

namespace fracint {

using Weight = std::vector<double>;

/// Throws ParameterError unless every entry is finite and strictly positive.
void check_weight(const FiniteSpace& s, std::span<const double> w, const char* what = "weight");

struct ExponentPair {
    double p = 2.0;
    double q = 2.0;
    double p_conj = 2.0;  // p' (infinity when p = 1)
    double q_conj = 2.0;
    double r = 2.0;       // 1 + q/p'
    double s_exp = 2.0;   // 1 + p'/q

    /// Requires 1 <= p <= q < infinity.
    static ExponentPair make(double p, double q);
};

double conjugate_exponent(double p);

/// (sum |f|^p density mass)^(1/p)
double weighted_lp_norm(const FiniteSpace& s, std::span<const double> f, std::span<const double> density,
                        double p);

/// max over distinct values v > 0 of |f| of v * (density-measure of {|f| >= v})^(1/q)
double weak_lorentz_norm(const FiniteSpace& s, std::span<const double> f, std::span<const double> density,
                         double q);

/// Entrywise w^e.
Weight power_of(std::span<const double> w, double e);

enum class WeightClass { a1, ap, apq, a1q };

std::string_view to_string(WeightClass c);
std::optional<WeightClass> parse_weight_class(std::string_view text);

struct WeightClassSpec {
    WeightClass cls = WeightClass::a1;
    double p = 2.0;
    double q = 2.0;
    MaximalMode mode = MaximalMode::full;

    static WeightClassSpec a1(MaximalMode mode = MaximalMode::full) { return {WeightClass::a1, 1.0, 1.0, mode}; }
    static WeightClassSpec ap(double p) { return {WeightClass::ap, p, p, MaximalMode::full}; }
    static WeightClassSpec apq(double p, double q) { return {WeightClass::apq, p, q, MaximalMode::full}; }
    static WeightClassSpec a1q(double q, MaximalMode mode = MaximalMode::full) {
        return {WeightClass::a1q, 1.0, q, mode};
    }
};

struct ConstantsReport {
    double value = 1.0;
    WeightClass cls = WeightClass::a1;
    PointId witness_center = 0;
    double witness_radius = 0.0;
    std::size_t witness_count = 0;        // members of the witness ball
    std::optional<PointId> witness_point;  // A1-type: argmax of Mw / w
    std::optional<MaximalMode> mode;       // A1-type only
};

ConstantsReport weight_constant(const FiniteSpace& s, std::span<const double> w, const WeightClassSpec& spec);

struct BallSup {
    double value = 0.0;
    PointId center = 0;
    std::size_t shell = 0;
};

/// max over balls B of avg_B(a) * avg_B(b)^e, first maximiser in scan order.
BallSup ball_average_sup(const FiniteSpace& s, std::span<const double> a, std::span<const double> b, double e);

/// u_t(x) = mu(B(center, rho(center, x)))^(t-1), u_t(center) = mu({center})^(t-1).
Weight power_weight(const FiniteSpace& s, double t, PointId center);

struct EpsilonPoint {
    bool feasible = false;
    PointId point = 0;
    double radius = 0.0;      // smallest qualifying radius (best ball when infeasible)
    std::size_t count = 0;    // members of that ball
    double ratio = 0.0;       // mu(B(point, radius)) / mu({point})
    double best_ratio = 0.0;  // max over all balls at any point
};

/// Point maximising max_R mu(B(x,R)) / mu({x}) and the smallest R with ratio > 1/eps.
EpsilonPoint epsilon_point(const FiniteSpace& s, double eps);

struct IdentityErrors {
    double apq_vs_ar = 0.0;       // [w]_{A_{p,q}} = [w^q]_{A_r}
    double apq_vs_dual = 0.0;     // [w]_{A_{p,q}} = [w^-1]_{A_{q',p'}}^{q/p'}
    double as_vs_apq = 0.0;       // [w^-p']_{A_s} = [w]_{A_{p,q}}^{p'/q}
    double a1q_vs_a1 = 0.0;       // [w]_{A_{1,q}} = [w^q]_{A_1}
    double max() const;
};

/// Relative discrepancies of the four weight-class identities, each side computed separately.
IdentityErrors weight_identity_errors(const FiniteSpace& s, std::span<const double> w, const ExponentPair& pq,
                                      MaximalMode mode = MaximalMode::full);

inline constexpr int kHalvingCap = 64;

/// r_0 = R, r_{i+1} = 2^-k R for the smallest admissible k with mu(B(r_{i+1})) < mu(B(r_i))/2.
/// Both halving estimates are checked against c_mu and throw InvariantViolation if broken.
std::vector<double> halving_radii(const FiniteSpace& s, PointId center, double R, double c_mu,
                                  int cap = kHalvingCap);
std::vector<double> halving_radii(const FiniteSpace& s, PointId center, double R);

}  // namespace fracint
