#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fracint {

using PointId = std::size_t;

inline constexpr std::size_t kMaxPointsGeneric = 1024;
inline constexpr std::size_t kMaxPointsOneDim = 4096;

// Relative slack granted to inequalities that hold exactly in real arithmetic
// but are evaluated in double precision.
inline constexpr double kRoundoff = 1e-12;

// Which infinite-space category a finite space truncates. Metadata only.
enum class Category { finite_measure, atom_floor, unbounded };

std::string_view to_string(Category c);
std::optional<Category> parse_category(std::string_view text);

struct SpaceOptions {
    std::string label;
    std::optional<Category> category;
    std::optional<double> a0_declared;
    std::vector<std::vector<double>> coords;
    std::size_t max_points = kMaxPointsGeneric;
};

// A finite quasi-metric measure space (X, rho, mu). Immutable once created; all
// accessors are safe to call concurrently.
class FiniteSpace {
public:
    // Validates the data (throws ValidationError naming offending indices) and
    // builds the per-centre neighbourhood index. dist is row-major n*n.
    static FiniteSpace create(std::vector<double> dist, std::vector<double> mass,
                              SpaceOptions options = {});

    std::size_t size() const noexcept { return n_; }
    double dist(PointId i, PointId j) const noexcept { return dist_[i * n_ + j]; }
    std::span<const double> distances() const noexcept { return dist_; }
    double mass(PointId i) const noexcept { return mass_[i]; }
    std::span<const double> masses() const noexcept { return mass_; }
    double total_mass() const noexcept { return total_mass_; }
    double min_mass() const noexcept { return min_mass_; }

    // Smallest A0 with rho(i,j) <= A0 (rho(i,k) + rho(k,j)) over all triples.
    double a0() const noexcept { return a0_; }
    const std::string& label() const noexcept { return label_; }
    std::optional<Category> category() const noexcept { return category_; }
    std::optional<double> a0_declared() const noexcept { return a0_declared_; }
    const std::vector<std::vector<double>>& coords() const noexcept { return coords_; }

    /// Points ordered by (distance from c, id). neighbors(c)[0] == c.
    std::span<const PointId> neighbors(PointId c) const noexcept {
        return {order_.data() + c * n_, n_};
    }
    std::span<const double> sorted_distances(PointId c) const noexcept {
        return {sorted_dist_.data() + c * n_, n_};
    }
    /// cumulative_mass(c)[k] is the mass of the first k+1 neighbours of c.
    std::span<const double> cumulative_mass(PointId c) const noexcept {
        return {cum_mass_.data() + c * n_, n_};
    }
    /// Prefix lengths of neighbors(c) after which the distance strictly grows.
    /// Every ball centred at c is exactly one of these prefixes.
    std::span<const std::uint32_t> shell_ends(PointId c) const noexcept {
        return {shell_ends_.data() + shell_offsets_[c], shell_offsets_[c + 1] - shell_offsets_[c]};
    }
    /// Position of y inside neighbors(c).
    std::uint32_t rank(PointId c, PointId y) const noexcept { return rank_[c * n_ + y]; }

    /// Number of points y with dist(c, y) < r.
    std::size_t count_within(PointId c, double r) const;
    /// mu(B(c, r)) for the strict ball; 0 when r <= 0.
    double ball_measure(PointId c, double r) const;
    /// mu(B(x, rho(x, y))) for x != y, and mu({x}) when x == y.
    double inner_measure(PointId x, PointId y) const noexcept { return inner_[x * n_ + y]; }
    /// Radius representing the ball formed by shell_ends(c)[shell]: the midpoint
    /// to the next distinct distance, or twice the largest distance for the
    /// outermost shell (1 for a single-point space).
    double shell_radius(PointId c, std::size_t shell) const;

private:
    FiniteSpace() = default;

    std::size_t n_ = 0;
    std::vector<double> dist_;
    std::vector<double> mass_;
    double total_mass_ = 0.0;
    double min_mass_ = 0.0;
    double a0_ = 1.0;
    std::string label_;
    std::optional<Category> category_;
    std::optional<double> a0_declared_;
    std::vector<std::vector<double>> coords_;

    std::vector<PointId> order_;
    std::vector<double> sorted_dist_;
    std::vector<double> cum_mass_;
    std::vector<std::uint32_t> rank_;
    std::vector<std::uint32_t> shell_ends_;
    std::vector<std::size_t> shell_offsets_;
    std::vector<double> inner_;
};

/// Throws ValidationError when dist/mass violate the quasi-metric measure axioms.
void check_space_data(std::span<const double> dist, std::span<const double> mass);

/// Minimal quasi-metric constant of a validated distance matrix (exhaustive triple scan).
double compute_a0(std::span<const double> dist, std::size_t n);

struct Ball {
    PointId center = 0;
    double radius = 0.0;
    std::vector<PointId> members;  // ascending ids
    double measure = 0.0;
};

// Lightweight ball: the first `count` neighbours of `center`.
struct BallRef {
    PointId center = 0;
    std::uint32_t count = 0;
    double radius = 0.0;
    double measure = 0.0;
};

Ball ball_members(const FiniteSpace& s, PointId center, double radius);
std::vector<PointId> members_of(const FiniteSpace& s, const BallRef& ball);

/// Every distinct ball, in (centre, radius) scan order, first witness kept.
std::vector<BallRef> enumerate_ball_refs(const FiniteSpace& s);
std::vector<Ball> enumerate_balls(const FiniteSpace& s);

/// All (centre, shell) prefixes including duplicates, in scan order. Suprema over
/// balls may be taken over this list directly.
template <typename F>
void for_each_shell(const FiniteSpace& s, PointId c, F&& f) {
    const auto ends = s.shell_ends(c);
    for (std::size_t k = 0; k < ends.size(); ++k) {
        f(k, static_cast<std::size_t>(ends[k]));
    }
}

struct DoublingResult {
    double c_mu = 1.0;      // C_mu
    double c_mu_exp = 0.0;  // log2 C_mu
    PointId witness_center = 0;
    double witness_radius = 0.0;
};

DoublingResult doubling_constant(const FiniteSpace& s);

/// max mu(B1) / min mu(B0) over balls.
double ball_ratio_supremum(const FiniteSpace& s);

struct AhlforsConstants {
    double upper = 0.0;  // C1
    double lower = 0.0;  // C2
    double dim = 1.0;
    double r_min = 0.0;
    double r_max = 0.0;
};

/// Best C1, C2 with C2 r^n <= mu(B(x, r)) <= C1 r^n over the breakpoint radii
/// (distances from x) in [r_min, r_max].
AhlforsConstants ahlfors_constants(const FiniteSpace& s, double n_dim, double r_min, double r_max);

struct SpaceStats {
    double a0 = 1.0;
    double c_mu_doubling = 1.0;
    double c_mu_exp = 0.0;
    double ball_ratio_sup = 1.0;
    double ahlfors_upper = 0.0;
    double ahlfors_lower = 0.0;
    double ahlfors_dim = 0.0;
};

/// Re-checks the axioms and computes every geometric constant. The Ahlfors window
/// spans all positive distances; the dimension defaults to c_mu (or 1 if c_mu = 0).
SpaceStats validate_space(const FiniteSpace& s, std::optional<double> ahlfors_dim = {});

enum class SpaceKind { grid1d, lattice1d, dyadic_line, cantor_tree, snowflake, perturbed };

std::string_view to_string(SpaceKind k);
std::optional<SpaceKind> parse_space_kind(std::string_view text);

struct GenerateParams {
    std::size_t n = 0;       // size; tree depth for cantor_tree
    std::size_t m = 4;       // dyadic_line resolution
    double epsilon = 1.0;    // snowflake exponent
    double factor_lo = 1.0;  // perturbed mass factors
    double factor_hi = 2.0;
    SpaceKind base = SpaceKind::grid1d;  // base for snowflake / perturbed
};

FiniteSpace generate_space(SpaceKind kind, const GenerateParams& params, std::uint64_t seed);
FiniteSpace snowflake(const FiniteSpace& base, double epsilon);
FiniteSpace perturb_masses(const FiniteSpace& base, double lo, double hi, std::uint64_t seed);

}  // namespace fracint
