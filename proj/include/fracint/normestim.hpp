#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fracint/operators.hpp"
#include "fracint/space.hpp"
#include "fracint/weights.hpp"

namespace fracint {

enum class NormTarget { strong, weak };

std::string_view to_string(NormTarget t);

struct BallWitness {
    PointId center = 0;
    std::size_t count = 0;  // prefix length of neighbors(center)
    double radius = 0.0;
};

struct TestingConstants {
    double s_pq = 0.0;       // [sigma, v]_{S_{p,q}}
    double s_qp_dual = 0.0;  // [v, sigma]_{S_{q',p'}} with the adjoint kernel
    BallWitness witness;
    BallWitness dual_witness;
};

/// Ball testing constants of T_gamma(. sigma) : L^p(sigma) -> L^q(v) and of its adjoint.
TestingConstants testing_constant(const FiniteSpace& s, double gamma, const ExponentPair& pq,
                                  std::span<const double> sigma, std::span<const double> v);

struct NormBudget {
    int sweeps = 200;
    std::uint64_t seed = 0;
    bool balls = true;   // (a) ball indicators
    bool power = true;   // (b) f_t u_t^gamma shapes at the epsilon-point centre
    bool random = true;  // (c) log-uniform random vectors
    std::vector<double> t_values{0.1, 0.25, 0.5, 0.75, 0.9};
    int random_count = 16;
    std::vector<double> factors{0.5, 1.0 / 1.1, 1.1, 2.0};
};

struct NormEstimate {
    double value = 0.0;
    FunctionVector witness;  // normalised in L^p(w^p)
    std::string family_tag;  // "ball", "power", "random"
    bool refined = false;
};

/// ||T_gamma f||_{L^q(w^q)} (or L^{q,inf}(w^q)) divided by ||f||_{L^p(w^p)}; 0 for f = 0.
double operator_ratio(const FiniteSpace& s, const GammaKernel& k, const ExponentPair& pq,
                      std::span<const double> w, std::span<const double> f, NormTarget target);

/// Certified lower bound on ||T_gamma||_{L^p(w^p) -> L^q(w^q)} (strong or weak target).
NormEstimate norm_lower_bound(const FiniteSpace& s, double gamma, const ExponentPair& pq,
                              std::span<const double> w, NormTarget target, const NormBudget& budget = {});

inline constexpr std::size_t kTinyOracleMaxPoints = 6;

/// Direction-grid search on non-negative f followed by fine local ascent. At most 6 points.
double exact_norm_tiny(const FiniteSpace& s, double gamma, const ExponentPair& pq, std::span<const double> w,
                       NormTarget target, int grid_res = 16);

}  // namespace fracint
