#include "fracint/space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "fracint/errors.hpp"
#include "fracint/parallel.hpp"
#include "fracint/random.hpp"

namespace fracint {

std::string_view to_string(Category c) {
    switch (c) {
        case Category::finite_measure: return "finite-measure";
        case Category::atom_floor: return "atom-floor";
        case Category::unbounded: return "unbounded";
    }
    return "unknown";
}

std::optional<Category> parse_category(std::string_view text) {
    if (text == "finite-measure") return Category::finite_measure;
    if (text == "atom-floor") return Category::atom_floor;
    if (text == "unbounded") return Category::unbounded;
    return std::nullopt;
}

void check_space_data(std::span<const double> dist, std::span<const double> mass) {
    const std::size_t n = mass.size();
    if (n == 0) {
        throw ValidationError("space has no points");
    }
    if (dist.size() != n * n) {
        std::ostringstream os;
        os << "distance matrix has " << dist.size() << " entries, expected " << n * n;
        throw ValidationError(os.str());
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(mass[i] > 0.0) || !std::isfinite(mass[i])) {
            std::ostringstream os;
            os << "mass of point " << i << " must be positive and finite, got " << mass[i];
            throw ValidationError(os.str());
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (dist[i * n + i] != 0.0) {
            std::ostringstream os;
            os << "dist[" << i << "][" << i << "] must be 0, got " << dist[i * n + i];
            throw ValidationError(os.str());
        }
        for (std::size_t j = i + 1; j < n; ++j) {
            const double a = dist[i * n + j];
            const double b = dist[j * n + i];
            if (!std::isfinite(a) || !std::isfinite(b) || a < 0.0 || b < 0.0) {
                std::ostringstream os;
                os << "dist[" << i << "][" << j << "] must be finite and non-negative";
                throw ValidationError(os.str());
            }
            if (a != b) {
                std::ostringstream os;
                os << "distance matrix is asymmetric at (" << i << ", " << j << "): " << a
                   << " vs " << b;
                throw ValidationError(os.str());
            }
            if (a == 0.0) {
                std::ostringstream os;
                os << "distinct points " << i << " and " << j << " are at distance 0";
                throw ValidationError(os.str());
            }
        }
    }
}

double compute_a0(std::span<const double> dist, std::size_t n) {
    std::vector<double> row_best(n, 1.0);
    parallel_for(n, [&](std::size_t i) {
        const double* di = dist.data() + i * n;
        double best = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double* dj = dist.data() + j * n;
            double shortest = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < n; ++k) {
                shortest = std::min(shortest, di[k] + dj[k]);
            }
            // k = i or k = j gives exactly dist[i][j], so shortest <= dist[i][j].
            best = std::max(best, di[j] / shortest);
        }
        row_best[i] = best;
    });
    return *std::max_element(row_best.begin(), row_best.end());
}

FiniteSpace FiniteSpace::create(std::vector<double> dist, std::vector<double> mass,
                                SpaceOptions options) {
    check_space_data(dist, mass);
    const std::size_t n = mass.size();
    if (n > options.max_points) {
        std::ostringstream os;
        os << "space has " << n << " points, cap is " << options.max_points;
        throw ValidationError(os.str());
    }

    FiniteSpace s;
    s.n_ = n;
    s.dist_ = std::move(dist);
    s.mass_ = std::move(mass);
    s.total_mass_ = std::accumulate(s.mass_.begin(), s.mass_.end(), 0.0);
    s.min_mass_ = *std::min_element(s.mass_.begin(), s.mass_.end());
    s.label_ = std::move(options.label);
    s.category_ = options.category;
    s.a0_declared_ = options.a0_declared;
    s.coords_ = std::move(options.coords);

    s.a0_ = compute_a0(s.dist_, n);
    if (s.a0_declared_ && *s.a0_declared_ < s.a0_ * (1.0 - kRoundoff)) {
        std::ostringstream os;
        os << "declared A0 = " << *s.a0_declared_ << " is below the minimal constant " << s.a0_;
        throw ValidationError(os.str());
    }

    s.order_.resize(n * n);
    s.sorted_dist_.resize(n * n);
    s.cum_mass_.resize(n * n);
    s.rank_.resize(n * n);
    s.inner_.resize(n * n);
    std::vector<std::vector<std::uint32_t>> shells(n);

    parallel_for(n, [&s, &shells, n](std::size_t c) {
        PointId* order = s.order_.data() + c * n;
        const double* row = s.dist_.data() + c * n;
        std::iota(order, order + n, PointId{0});
        std::sort(order, order + n, [row](PointId a, PointId b) {
            return row[a] < row[b] || (row[a] == row[b] && a < b);
        });
        double running = 0.0;
        double before_shell = 0.0;
        auto& ends = shells[c];
        for (std::size_t k = 0; k < n; ++k) {
            const PointId y = order[k];
            const double d = row[y];
            if (k > 0 && d != row[order[k - 1]]) {
                ends.push_back(static_cast<std::uint32_t>(k));
                before_shell = running;
            }
            s.sorted_dist_[c * n + k] = d;
            running += s.mass_[y];
            s.cum_mass_[c * n + k] = running;
            s.rank_[c * n + y] = static_cast<std::uint32_t>(k);
            s.inner_[c * n + y] = (y == c) ? s.mass_[c] : before_shell;
        }
        ends.push_back(static_cast<std::uint32_t>(n));
    });

    s.shell_offsets_.assign(n + 1, 0);
    for (std::size_t c = 0; c < n; ++c) {
        s.shell_offsets_[c + 1] = s.shell_offsets_[c] + shells[c].size();
    }
    s.shell_ends_.reserve(s.shell_offsets_[n]);
    for (const auto& ends : shells) {
        s.shell_ends_.insert(s.shell_ends_.end(), ends.begin(), ends.end());
    }
    return s;
}

std::size_t FiniteSpace::count_within(PointId c, double r) const {
    const auto d = sorted_distances(c);
    return static_cast<std::size_t>(std::lower_bound(d.begin(), d.end(), r) - d.begin());
}

double FiniteSpace::ball_measure(PointId c, double r) const {
    const std::size_t k = count_within(c, r);
    return k == 0 ? 0.0 : cumulative_mass(c)[k - 1];
}

double FiniteSpace::shell_radius(PointId c, std::size_t shell) const {
    const auto ends = shell_ends(c);
    const auto d = sorted_distances(c);
    const std::size_t end = ends[shell];
    const double inner = d[end - 1];
    if (end < n_) {
        return std::midpoint(inner, d[end]);
    }
    return inner > 0.0 ? 2.0 * inner : 1.0;
}

Ball ball_members(const FiniteSpace& s, PointId center, double radius) {
    Ball b;
    b.center = center;
    b.radius = radius;
    if (radius <= 0.0) {
        return b;
    }
    const std::size_t k = s.count_within(center, radius);
    const auto nb = s.neighbors(center);
    b.members.assign(nb.begin(), nb.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(b.members.begin(), b.members.end());
    b.measure = k == 0 ? 0.0 : s.cumulative_mass(center)[k - 1];
    return b;
}

std::vector<PointId> members_of(const FiniteSpace& s, const BallRef& ball) {
    const auto nb = s.neighbors(ball.center);
    std::vector<PointId> m(nb.begin(), nb.begin() + ball.count);
    std::sort(m.begin(), m.end());
    return m;
}

std::vector<BallRef> enumerate_ball_refs(const FiniteSpace& s) {
    const std::size_t n = s.size();
    // Zobrist keys; equal hashes are confirmed by an exact membership test.
    std::vector<std::uint64_t> key(n);
    std::mt19937_64 keygen(0x5eedf00dULL);
    for (auto& k : key) {
        k = keygen();
    }

    std::vector<BallRef> out;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> seen;
    for (PointId c = 0; c < n; ++c) {
        const auto nb = s.neighbors(c);
        const auto cum = s.cumulative_mass(c);
        std::uint64_t h = 0;
        std::size_t filled = 0;
        for_each_shell(s, c, [&](std::size_t shell, std::size_t end) {
            for (; filled < end; ++filled) {
                h += key[nb[filled]];
            }
            const std::uint64_t tagged = h ^ (static_cast<std::uint64_t>(end) * 0x9e3779b97f4a7c15ULL);
            auto& bucket = seen[tagged];
            for (std::size_t idx : bucket) {
                const BallRef& other = out[idx];
                if (other.count != end) continue;
                bool same = true;
                const double r = other.radius;
                for (std::size_t k = 0; k < end && same; ++k) {
                    same = s.dist(other.center, nb[k]) < r;
                }
                if (same) return;
            }
            bucket.push_back(out.size());
            out.push_back(BallRef{c, static_cast<std::uint32_t>(end), s.shell_radius(c, shell),
                                  cum[end - 1]});
        });
    }
    return out;
}

std::vector<Ball> enumerate_balls(const FiniteSpace& s) {
    std::vector<Ball> out;
    for (const BallRef& r : enumerate_ball_refs(s)) {
        out.push_back(Ball{r.center, r.radius, members_of(s, r), r.measure});
    }
    return out;
}

DoublingResult doubling_constant(const FiniteSpace& s) {
    const std::size_t n = s.size();
    struct Best {
        double ratio = 1.0;
        double radius = 1.0;
    };
    std::vector<Best> per_center(n);

    parallel_for(n, [&](std::size_t c) {
        const auto d = s.sorted_distances(c);
        std::vector<double> breaks;
        breaks.reserve(2 * n);
        for (std::size_t k = 1; k < n; ++k) {
            breaks.push_back(d[k]);
            breaks.push_back(d[k] / 2.0);
        }
        std::sort(breaks.begin(), breaks.end());
        breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

        const auto cum = s.cumulative_mass(c);
        Best best;
        best.radius = breaks.empty() ? 1.0 : 2.0 * breaks.back();
        auto consider = [&](double r) {
            const std::size_t inner = s.count_within(c, r);
            const std::size_t outer = s.count_within(c, 2.0 * r);
            const double ratio = cum[outer - 1] / cum[inner - 1];
            if (ratio > best.ratio) {
                best.ratio = ratio;
                best.radius = r;
            }
        };
        double prev = 0.0;
        for (double b : breaks) {
            consider(std::midpoint(prev, b));
            prev = b;
        }
        // Beyond the last breakpoint both balls are the whole space (ratio 1).
        per_center[c] = best;
    });

    DoublingResult out;
    out.witness_radius = per_center[0].radius;
    for (std::size_t c = 0; c < n; ++c) {
        if (per_center[c].ratio > out.c_mu) {
            out.c_mu = per_center[c].ratio;
            out.witness_center = c;
            out.witness_radius = per_center[c].radius;
        }
    }
    out.c_mu_exp = std::log2(out.c_mu);
    return out;
}

double ball_ratio_supremum(const FiniteSpace& s) {
    // Largest ball is X; smallest is a singleton, and every singleton is a ball.
    return s.total_mass() / s.min_mass();
}

AhlforsConstants ahlfors_constants(const FiniteSpace& s, double n_dim, double r_min, double r_max) {
    require(n_dim > 0.0, "ahlfors dimension must be positive");
    require(r_min > 0.0 && r_min < r_max, "ahlfors window requires 0 < r_min < r_max");
    AhlforsConstants out;
    out.dim = n_dim;
    out.r_min = r_min;
    out.r_max = r_max;

    const std::size_t n = s.size();
    if (n == 1) {
        // One configuration for every r > 0; r_max stands in as its breakpoint.
        out.upper = out.lower = s.mass(0) / std::pow(r_max, n_dim);
        return out;
    }

    double upper = -1.0;
    double lower = std::numeric_limits<double>::infinity();
    for (PointId c = 0; c < n; ++c) {
        const auto d = s.sorted_distances(c);
        const auto cum = s.cumulative_mass(c);
        for (std::uint32_t end : s.shell_ends(c)) {
            if (end == n) break;
            const double r = d[end];
            if (r < r_min || r > r_max) continue;
            const double v = cum[end - 1] / std::pow(r, n_dim);
            upper = std::max(upper, v);
            lower = std::min(lower, v);
        }
    }
    if (upper < 0.0) {
        throw ParameterError("ahlfors window contains no breakpoint radius");
    }
    out.upper = upper;
    out.lower = lower;
    return out;
}

SpaceStats validate_space(const FiniteSpace& s, std::optional<double> ahlfors_dim) {
    check_space_data(s.distances(), s.masses());
    SpaceStats st;
    st.a0 = compute_a0(s.distances(), s.size());
    const DoublingResult dbl = doubling_constant(s);
    st.c_mu_doubling = dbl.c_mu;
    st.c_mu_exp = dbl.c_mu_exp;
    st.ball_ratio_sup = ball_ratio_supremum(s);

    double dim = ahlfors_dim.value_or(dbl.c_mu_exp > 0.0 ? dbl.c_mu_exp : 1.0);
    st.ahlfors_dim = dim;
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (double d : s.distances()) {
        if (d > 0.0) {
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
    }
    if (s.size() == 1) {
        lo = 0.5;
        hi = 1.0;
    } else if (!(lo < hi)) {
        hi = 2.0 * lo;
    }
    const AhlforsConstants ah = ahlfors_constants(s, dim, lo, hi);
    st.ahlfors_upper = ah.upper;
    st.ahlfors_lower = ah.lower;
    return st;
}

std::string_view to_string(SpaceKind k) {
    switch (k) {
        case SpaceKind::grid1d: return "grid1d";
        case SpaceKind::lattice1d: return "lattice1d";
        case SpaceKind::dyadic_line: return "dyadic_line";
        case SpaceKind::cantor_tree: return "cantor_tree";
        case SpaceKind::snowflake: return "snowflake";
        case SpaceKind::perturbed: return "perturbed";
    }
    return "unknown";
}

std::optional<SpaceKind> parse_space_kind(std::string_view text) {
    for (SpaceKind k : {SpaceKind::grid1d, SpaceKind::lattice1d, SpaceKind::dyadic_line,
                        SpaceKind::cantor_tree, SpaceKind::snowflake, SpaceKind::perturbed}) {
        if (to_string(k) == text) return k;
    }
    return std::nullopt;
}

namespace {

// Points k/scale for integer k in [lo, hi]; distances |i - j| / scale so equal
// integer gaps give bit-identical distances.
FiniteSpace integer_line(long lo, long hi, double scale, double point_mass, std::string label,
                         Category category) {
    const std::size_t n = static_cast<std::size_t>(hi - lo + 1);
    std::vector<double> dist(n * n);
    std::vector<std::vector<double>> coords(n);
    for (std::size_t i = 0; i < n; ++i) {
        coords[i] = {static_cast<double>(lo + static_cast<long>(i)) / scale};
        for (std::size_t j = 0; j < n; ++j) {
            const double gap = i > j ? static_cast<double>(i - j) : static_cast<double>(j - i);
            dist[i * n + j] = gap / scale;
        }
    }
    SpaceOptions opt;
    opt.label = std::move(label);
    opt.category = category;
    opt.coords = std::move(coords);
    opt.max_points = kMaxPointsOneDim;
    return FiniteSpace::create(std::move(dist), std::vector<double>(n, point_mass), std::move(opt));
}

FiniteSpace cantor_tree(std::size_t depth) {
    require(depth >= 1 && depth <= 12, "cantor_tree depth must be in [1, 12]");
    const std::size_t n = std::size_t{1} << depth;
    std::vector<double> dist(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            // Leaves i, j split below their lowest common ancestor; path length is
            // twice the number of levels under it.
            std::size_t up = 0;
            std::size_t a = i, b = j;
            while (a != b) {
                a >>= 1;
                b >>= 1;
                ++up;
            }
            dist[i * n + j] = 2.0 * static_cast<double>(up);
        }
    }
    SpaceOptions opt;
    opt.label = "cantor_tree(depth=" + std::to_string(depth) + ")";
    opt.category = Category::finite_measure;
    opt.max_points = kMaxPointsOneDim;
    return FiniteSpace::create(std::move(dist), std::vector<double>(n, 1.0 / static_cast<double>(n)),
                               std::move(opt));
}

}  // namespace

FiniteSpace snowflake(const FiniteSpace& base, double epsilon) {
    require(epsilon > 0.0 && epsilon <= 1.0, "snowflake exponent must lie in (0, 1]");
    std::vector<double> dist(base.distances().begin(), base.distances().end());
    for (double& d : dist) {
        d = (d == 0.0) ? 0.0 : std::pow(d, epsilon);
    }
    SpaceOptions opt;
    std::ostringstream label;
    label << "snowflake(" << base.label() << ", eps=" << epsilon << ")";
    opt.label = label.str();
    opt.category = base.category();
    opt.max_points = std::max(kMaxPointsGeneric, base.size());
    return FiniteSpace::create(std::move(dist),
                               std::vector<double>(base.masses().begin(), base.masses().end()),
                               std::move(opt));
}

FiniteSpace perturb_masses(const FiniteSpace& base, double lo, double hi, std::uint64_t seed) {
    require(lo >= 1.0 && hi <= 2.0 && lo <= hi, "perturbation factors must lie in [1, 2]");
    Rng rng(seed);
    std::vector<double> mass(base.masses().begin(), base.masses().end());
    for (double& m : mass) {
        m *= rng.uniform(lo, hi);
    }
    SpaceOptions opt;
    std::ostringstream label;
    label << "perturbed(" << base.label() << ", seed=" << seed << ")";
    opt.label = label.str();
    opt.category = base.category();
    opt.coords = base.coords();
    opt.max_points = std::max(kMaxPointsGeneric, base.size());
    return FiniteSpace::create(std::vector<double>(base.distances().begin(), base.distances().end()),
                               std::move(mass), std::move(opt));
}

FiniteSpace generate_space(SpaceKind kind, const GenerateParams& params, std::uint64_t seed) {
    const std::size_t n = params.n;
    switch (kind) {
        case SpaceKind::grid1d: {
            require(n >= 2, "grid1d requires n >= 2");
            require(n <= kMaxPointsOneDim, "grid1d size exceeds the point cap");
            return integer_line(0, static_cast<long>(n) - 1, static_cast<double>(n),
                                1.0 / static_cast<double>(n), "grid1d(n=" + std::to_string(n) + ")",
                                Category::finite_measure);
        }
        case SpaceKind::lattice1d: {
            require(n >= 2, "lattice1d requires n >= 2");
            require(2 * n + 1 <= kMaxPointsOneDim, "lattice1d size exceeds the point cap");
            const long half = static_cast<long>(n);
            return integer_line(-half, half, 1.0, 1.0, "lattice1d(n=" + std::to_string(n) + ")",
                                Category::atom_floor);
        }
        case SpaceKind::dyadic_line: {
            require(n >= 2, "dyadic_line requires n >= 2");
            require(params.m >= 1, "dyadic_line requires m >= 1");
            require(2 * n + 1 <= kMaxPointsOneDim, "dyadic_line size exceeds the point cap");
            const long half = static_cast<long>(n);
            const double m = static_cast<double>(params.m);
            return integer_line(-half, half, m, 1.0 / m,
                                "dyadic_line(n=" + std::to_string(n) + ",m=" + std::to_string(params.m) + ")",
                                Category::unbounded);
        }
        case SpaceKind::cantor_tree: {
            require(n >= 2, "cantor_tree requires n >= 2 (n is the tree depth)");
            return cantor_tree(n);
        }
        case SpaceKind::snowflake:
        case SpaceKind::perturbed: {
            require(params.base != SpaceKind::snowflake && params.base != SpaceKind::perturbed,
                    "base kind must be one of grid1d, lattice1d, dyadic_line, cantor_tree");
            const FiniteSpace base = generate_space(params.base, params, seed);
            if (kind == SpaceKind::snowflake) {
                return snowflake(base, params.epsilon);
            }
            return perturb_masses(base, params.factor_lo, params.factor_hi, seed);
        }
    }
    throw ParameterError("unknown space kind");
}

}  // namespace fracint
