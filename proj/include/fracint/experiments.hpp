#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fracint/normestim.hpp"
#include "fracint/operators.hpp"
#include "fracint/space.hpp"
#include "fracint/weights.hpp"

namespace fracint {

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t n_points = 0;
    double expected_exponent = 0.0;
};

/// Least squares of log y on log x. Needs >= 3 positive pairs.
FitResult fit_power_law(std::span<const double> x, std::span<const double> y);

enum class ModeChoice { automatic, full, centered };

std::optional<ModeChoice> parse_mode_choice(std::string_view text);
MaximalMode resolve_mode(ModeChoice choice, std::size_t n);

inline constexpr std::size_t kFullModeLimit = 1024;

struct SweepConfig {
    ModeChoice mode = ModeChoice::automatic;
    std::uint64_t seed = 0;
    double exponent_tolerance = 1e-9;  // |1/p - 1/q - gamma|
    double t_min = 0.02;
    double t_max = 0.98;
};

struct SweepRow {
    double t = 0.0;
    PointId center = 0;
    bool feasible_eps3t = false;
    bool feasible_eps_gamma = false;
    double a1_const = 0.0;
    double ball_R = 0.0;
    double weak_norm = 0.0;
    double fp_norm = 0.0;
    double ratio = 0.0;
    double ut_ball = 0.0;       // u_t(B)
    double ball_measure = 0.0;  // mu(B)
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::optional<FitResult> fit;
    MaximalMode mode = MaximalMode::full;
    bool all_infeasible = false;
    std::vector<std::string> warnings;
};

SweepResult sharpness_sweep(const FiniteSpace& s, double gamma, const ExponentPair& pq,
                            std::span<const double> t_grid, const SweepConfig& config = {});

/// Evenly spaced grid of `steps` values from t_min to t_max inclusive.
std::vector<double> linear_grid(double t_min, double t_max, int steps);

struct HlsRow {
    std::string space_label;
    std::size_t n = 0;
    double p = 0.0;
    double q = 0.0;
    double sup_lb_ratio = 0.0;
    double norm_lb = 0.0;
    double growth_factor = 1.0;
};

/// Certified lower bound mu(B)^(1/q) mu(B) mu(B(x0, 3 A0^2 r))^(gamma-1) / mu(B)^(1/p), maximised over balls.
double sup_lb_ratio(const FiniteSpace& s, double gamma, double p, double q);

/// Rows grouped by pair, then by space in family order.
std::vector<HlsRow> hls_scan(std::span<const FiniteSpace> family, double gamma,
                             std::span<const std::pair<double, double>> pairs);

struct InvariantOutcome {
    std::string name;
    std::size_t checked = 0;
    std::size_t passed = 0;
    double worst_slack = 0.0;  // min over checks of (rhs - lhs) / |rhs|; negative means violated
    std::size_t flagged = 0;   // verbatim-claim deviations (never failures)
    std::vector<std::string> notes;

    bool ok() const { return passed == checked; }
};

struct SuiteReport {
    std::vector<InvariantOutcome> invariants;

    bool ok() const;
    std::size_t flagged() const;
    const InvariantOutcome* find(std::string_view name) const;
};

/// Runs every invariant, or only those named in `only`. Results of a subset match the full run.
SuiteReport invariant_suite(const FiniteSpace& s, std::uint64_t seed, int samples,
                            std::span<const std::string_view> only = {});

/// Sublevel thresholds used by the suite: 10 linear in (0, mu(X)] and 10 log-spaced in [min mass/2, 2 mu(X)].
std::vector<double> suite_levels(const FiniteSpace& s);

}  // namespace fracint
