#include "fracint/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_set>

#include "fracint/errors.hpp"
#include "fracint/parallel.hpp"
#include "fracint/random.hpp"

namespace fracint {

FitResult fit_power_law(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size(), "fit needs equally many x and y values");
    require(x.size() >= 3, "fit needs at least 3 points");
    const std::size_t n = x.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        require(x[i] > 0.0 && y[i] > 0.0 && std::isfinite(x[i]) && std::isfinite(y[i]),
                "fit needs finite positive values");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(n);
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    require(sxx > 0.0, "fit needs at least two distinct x values");
    FitResult r;
    r.n_points = n;
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = ly[i] - (r.intercept + r.slope * lx[i]);
        ss_res += e * e;
    }
    r.r_squared = syy == 0.0 ? 1.0 : std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
    return r;
}

std::optional<ModeChoice> parse_mode_choice(std::string_view text) {
    if (text == "auto") return ModeChoice::automatic;
    if (text == "full") return ModeChoice::full;
    if (text == "centered") return ModeChoice::centered;
    return std::nullopt;
}

MaximalMode resolve_mode(ModeChoice choice, std::size_t n) {
    switch (choice) {
        case ModeChoice::full: return MaximalMode::full;
        case ModeChoice::centered: return MaximalMode::centered;
        case ModeChoice::automatic: break;
    }
    return n <= kFullModeLimit ? MaximalMode::full : MaximalMode::centered;
}

std::vector<double> linear_grid(double t_min, double t_max, int steps) {
    require(steps >= 1, "grid needs at least one step");
    std::vector<double> out(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) {
        out[static_cast<std::size_t>(i)] =
            steps == 1 ? t_min : t_min + (t_max - t_min) * static_cast<double>(i) / static_cast<double>(steps - 1);
    }
    return out;
}

namespace {

// best_ratio > 1/eps evaluated in logs so tiny thresholds do not underflow.
bool feasible(double best_ratio, double log_inv_eps) {
    return std::log(best_ratio) > log_inv_eps;
}

}  // namespace

SweepResult sharpness_sweep(const FiniteSpace& s, double gamma, const ExponentPair& pq,
                            std::span<const double> t_grid, const SweepConfig& config) {
    check_gamma(gamma);
    const double gap = 1.0 / pq.p - 1.0 / pq.q;
    if (std::abs(gap - gamma) > config.exponent_tolerance) {
        std::ostringstream os;
        os << "exponents violate 1/p - 1/q = gamma (1/p - 1/q = " << gap << ", gamma = " << gamma << ")";
        throw ParameterError(os.str());
    }
    require(!t_grid.empty(), "t grid is empty");

    SweepResult result;
    result.mode = resolve_mode(config.mode, s.size());
    std::vector<double> ts(t_grid.begin(), t_grid.end());
    for (double& t : ts) {
        require(t > 0.0 && t < 1.0, "t values must lie in (0, 1)");
        if (t < 0.05 || t > 0.9) {
            std::ostringstream os;
            os << "t = " << t << " lies outside [0.05, 0.9]";
            result.warnings.push_back(os.str());
        }
        t = std::clamp(t, config.t_min, config.t_max);
    }

    const double c_mu = doubling_constant(s).c_mu;
    const double log2c = std::log(2.0 * c_mu);
    const EpsilonPoint ep = epsilon_point(s, 0.5);
    const PointId center = ep.point;
    const std::size_t last_shell = s.shell_ends(center).size() - 1;
    const double ball_R = s.shell_radius(center, last_shell);
    const std::size_t count = s.shell_ends(center)[last_shell];
    const auto nb = s.neighbors(center);
    FunctionVector chi(s.size(), 0.0);
    for (std::size_t i = 0; i < count; ++i) chi[nb[i]] = 1.0;
    const double mu_b = s.cumulative_mass(center)[count - 1];
    const GammaKernel kernel(s, gamma);

    result.rows.resize(ts.size());
    parallel_for(ts.size(), [&](std::size_t i) {
        const double t = ts[i];
        SweepRow& row = result.rows[i];
        row.t = t;
        row.center = center;
        row.feasible_eps3t = feasible(ep.best_ratio, 3.0 / t * log2c);
        row.feasible_eps_gamma = feasible(ep.best_ratio, (2.0 + 4.0 / (t * gamma)) * log2c);
        const Weight u = power_weight(s, t, center);
        row.a1_const = weight_constant(s, u, WeightClassSpec::a1(result.mode)).value;
        row.ball_R = ball_R;
        FunctionVector f(s.size());
        for (std::size_t x = 0; x < f.size(); ++x) f[x] = chi[x] * std::pow(u[x], gamma);
        row.weak_norm = weak_lorentz_norm(s, kernel.apply(f), u, pq.q);
        row.fp_norm = weighted_lp_norm(s, chi, u, pq.p);
        row.ratio = row.weak_norm / row.fp_norm;
        double ub = 0.0;
        for (std::size_t x = 0; x < f.size(); ++x) ub += chi[x] * u[x] * s.mass(x);
        row.ut_ball = ub;
        row.ball_measure = mu_b;
    });

    result.all_infeasible = std::none_of(result.rows.begin(), result.rows.end(), [](const SweepRow& r) {
        return r.feasible_eps3t || r.feasible_eps_gamma;
    });
    if (result.all_infeasible) {
        result.warnings.push_back("no t is feasible for either epsilon-point threshold");
    }

    std::vector<double> xs, ys, seen;
    for (const SweepRow& r : result.rows) {
        if (std::find(seen.begin(), seen.end(), r.t) != seen.end()) continue;
        seen.push_back(r.t);
        xs.push_back(r.a1_const);
        ys.push_back(r.ratio);
    }
    if (xs.size() >= 3) {
        FitResult fit = fit_power_law(xs, ys);
        fit.expected_exponent = 1.0 - gamma;
        result.fit = fit;
    } else {
        result.warnings.push_back("fewer than 3 distinct t values; no fit");
    }
    return result;
}

double sup_lb_ratio(const FiniteSpace& s, double gamma, double p, double q) {
    const double dil = 3.0 * s.a0() * s.a0();
    std::vector<double> per_center(s.size());
    parallel_for(s.size(), [&](std::size_t c) {
        const auto cum = s.cumulative_mass(c);
        double best = 0.0;
        for_each_shell(s, c, [&](std::size_t k, std::size_t end) {
            const double mb = cum[end - 1];
            const double big = s.ball_measure(c, dil * s.shell_radius(c, k));
            best = std::max(best, std::pow(mb, 1.0 / q) * mb * std::pow(big, gamma - 1.0) / std::pow(mb, 1.0 / p));
        });
        per_center[c] = best;
    });
    return *std::max_element(per_center.begin(), per_center.end());
}

std::vector<HlsRow> hls_scan(std::span<const FiniteSpace> family, double gamma,
                             std::span<const std::pair<double, double>> pairs) {
    check_gamma(gamma);
    const std::size_t m = family.size();
    std::vector<HlsRow> rows(pairs.size() * m);
    parallel_for(rows.size(), [&](std::size_t idx) {
        const auto [p, q] = pairs[idx / m];
        const FiniteSpace& s = family[idx % m];
        const ExponentPair pq = ExponentPair::make(p, q);
        HlsRow& row = rows[idx];
        row.space_label = s.label();
        row.n = s.size();
        row.p = p;
        row.q = q;
        row.sup_lb_ratio = sup_lb_ratio(s, gamma, p, q);
        NormBudget budget;
        budget.sweeps = 0;
        budget.power = false;
        budget.random = false;
        const Weight one(s.size(), 1.0);
        row.norm_lb = norm_lower_bound(s, gamma, pq, one, NormTarget::strong, budget).value;
    });
    for (std::size_t idx = 0; idx < rows.size(); ++idx) {
        rows[idx].growth_factor = idx % m == 0 ? 1.0 : rows[idx].sup_lb_ratio / rows[idx - 1].sup_lb_ratio;
    }
    return rows;
}

bool SuiteReport::ok() const {
    return std::all_of(invariants.begin(), invariants.end(), [](const InvariantOutcome& o) { return o.ok(); });
}

std::size_t SuiteReport::flagged() const {
    std::size_t total = 0;
    for (const auto& o : invariants) total += o.flagged;
    return total;
}

const InvariantOutcome* SuiteReport::find(std::string_view name) const {
    for (const auto& o : invariants) {
        if (o.name == name) return &o;
    }
    return nullptr;
}

namespace {

constexpr std::size_t kMaxNotes = 5;

class Tally {
public:
    Tally() = default;
    explicit Tally(std::string name) { out_.name = std::move(name); }

    // lhs <= rhs up to relative tolerance tol
    void le(double lhs, double rhs, double tol = kRoundoff, const char* what = nullptr) {
        const double scale = std::max(std::abs(lhs), std::abs(rhs));
        record(scale == 0.0 ? 0.0 : (rhs - lhs) / scale, tol, what, lhs, rhs);
    }

    void eq(double a, double b, double tol = kRoundoff, const char* what = nullptr) {
        const double scale = std::max(std::abs(a), std::abs(b));
        record(scale == 0.0 ? 0.0 : -std::abs(a - b) / scale, tol, what, a, b);
    }

    void truth(bool ok, const std::string& note = {}) {
        ++out_.checked;
        if (ok) {
            ++out_.passed;
        } else {
            add_note(note.empty() ? "check failed" : note);
        }
        worst_ = std::min(worst_, ok ? 0.0 : -1.0);
    }

    void flag(const std::string& note) {
        ++out_.flagged;
        add_note("flag: " + note);
    }

    void merge(const Tally& other) {
        out_.checked += other.out_.checked;
        out_.passed += other.out_.passed;
        out_.flagged += other.out_.flagged;
        worst_ = std::min(worst_, other.worst_);
        for (const auto& n : other.out_.notes) add_note(n);
    }

    InvariantOutcome finish() {
        out_.worst_slack = out_.checked == 0 ? 0.0 : worst_;
        return std::move(out_);
    }

private:
    void record(double slack, double tol, const char* what, double lhs, double rhs) {
        ++out_.checked;
        worst_ = std::min(worst_, slack);
        if (slack >= -tol) {
            ++out_.passed;
        } else {
            std::ostringstream os;
            os.precision(17);
            os << (what ? what : "inequality") << ": " << lhs << " vs " << rhs;
            add_note(os.str());
        }
    }

    void add_note(const std::string& note) {
        if (out_.notes.size() < kMaxNotes) out_.notes.push_back(note);
    }

    InvariantOutcome out_;
    double worst_ = std::numeric_limits<double>::infinity();
};

// Runs body(i, tally_i) in parallel and merges the tallies in index order.
template <typename F>
void tally_parallel(Tally& into, std::size_t count, F&& body) {
    std::vector<Tally> parts(count);
    parallel_for(count, [&](std::size_t i) { body(i, parts[i]); });
    for (const Tally& t : parts) into.merge(t);
}

FunctionVector random_positive(Rng& rng, std::size_t n, double lo, double hi) {
    FunctionVector f(n);
    for (double& x : f) x = rng.log_uniform(lo, hi);
    return f;
}

const double kGammas[] = {0.25, 0.5, 0.75};
const double kExponents[] = {1.25, 1.5, 2.0, 3.0};

ExponentPair random_pair(Rng& rng) {
    const std::size_t i = rng.below(4);
    const std::size_t j = i + rng.below(4 - i);
    return ExponentPair::make(kExponents[i], kExponents[j]);
}

int ceil_log2(double x) {
    return static_cast<int>(std::ceil(std::log2(x)));
}

}  // namespace

std::vector<double> suite_levels(const FiniteSpace& s) {
    std::vector<double> ts;
    for (int j = 1; j <= 10; ++j) ts.push_back(s.total_mass() * j / 10.0);
    const double lo = s.min_mass() / 2.0;
    const double hi = 2.0 * s.total_mass();
    for (int j = 0; j < 10; ++j) ts.push_back(lo * std::pow(hi / lo, j / 9.0));
    return ts;
}

SuiteReport invariant_suite(const FiniteSpace& s, std::uint64_t seed, int samples,
                            std::span<const std::string_view> only) {
    require(samples >= 1, "samples must be at least 1");
    const std::size_t n = s.size();
    const std::size_t ns = static_cast<std::size_t>(samples);
    const double a0 = s.a0();
    const DoublingResult dbl = doubling_constant(s);
    const double c_mu = dbl.c_mu;
    const double c_adj = std::pow(c_mu, ceil_log2(2.0 * a0) + 1);
    SuiteReport report;
    std::uint64_t block = 0;
    std::uint64_t stream = 0;
    auto next_rng = [&] { return Rng::stream(seed, stream++); };
    // each block draws from its own stream range so a subset run reproduces the full run
    auto begin_block = [&](std::initializer_list<std::string_view> names) {
        stream = ++block << 32;
        if (only.empty()) return true;
        return std::any_of(names.begin(), names.end(), [&](std::string_view nm) {
            return std::find(only.begin(), only.end(), nm) != only.end();
        });
    };

    if (begin_block({"quasi_triangle"})) {
        Tally t("quasi_triangle");
        tally_parallel(t, n, [&](std::size_t i, Tally& part) {
            for (std::size_t j = 0; j < n; ++j) {
                for (std::size_t k = 0; k < n; ++k) {
                    part.le(s.dist(i, j), a0 * (s.dist(i, k) + s.dist(k, j)));
                }
            }
        });
        report.invariants.push_back(t.finish());
    }
    if (begin_block({"doubling_growth"})) {
        Tally t("doubling_growth");
        tally_parallel(t, n, [&](std::size_t x, Tally& part) {
            const auto d = s.sorted_distances(x);
            const auto cum = s.cumulative_mass(x);
            const auto ends = s.shell_ends(x);
            // breakpoint radius d[ends[j-1]] carries mu(B) = cum through shell j-1
            std::vector<double> re(ends.size());
            for (std::size_t j = 1; j < ends.size(); ++j) re[j] = std::pow(d[ends[j - 1]], dbl.c_mu_exp);
            for (std::size_t j = 1; j < ends.size(); ++j) {
                const double mr = cum[ends[j - 1] - 1];
                for (std::size_t k = j; k < ends.size(); ++k) {
                    const double mR = cum[ends[k - 1] - 1];
                    part.le(mR / mr, c_mu * re[k] / re[j]);
                }
            }
        });
        report.invariants.push_back(t.finish());
    }
    if (begin_block({"atom_singleton"})) {
        Tally t("atom_singleton");
        for (std::size_t x = 0; n > 1 && x < n; ++x) {
            const double r = s.sorted_distances(x)[1];
            const Ball b = ball_members(s, x, r);
            t.truth(b.members.size() == 1 && b.members[0] == x, "point " + std::to_string(x));
        }
        report.invariants.push_back(t.finish());
    }
    if (begin_block({"enumeration_exhaustive"})) {
        Tally t("enumeration_exhaustive");
        std::mt19937_64 keys_rng(0x0ddba11);
        std::vector<std::uint64_t> keys(n);
        for (auto& k : keys) k = keys_rng();
        std::unordered_set<std::uint64_t> known;
        for (const BallRef& b : enumerate_ball_refs(s)) {
            std::uint64_t h = b.count * 0x9e3779b97f4a7c15ULL;
            for (PointId y : members_of(s, b)) h ^= keys[y];
            known.insert(h);
        }
        tally_parallel(t, n, [&](std::size_t c, Tally& part) {
            const auto d = s.sorted_distances(c);
            for (std::size_t k = 1; k < n; ++k) {
                if (d[k] == d[k - 1]) continue;
                for (double r : {d[k] * (1.0 - 1e-9), d[k] * (1.0 + 1e-9)}) {
                    std::uint64_t h = 0;
                    std::uint64_t count = 0;
                    for (std::size_t y = 0; y < n; ++y) {
                        if (s.dist(c, y) < r) {
                            h ^= keys[y];
                            ++count;
                        }
                    }
                    h ^= count * 0x9e3779b97f4a7c15ULL;
                    part.truth(known.count(h) == 1, "centre " + std::to_string(c) + " radius " + std::to_string(r));
                }
            }
        });
        report.invariants.push_back(t.finish());
    }
    if (begin_block({"kernel_quasi_symmetry"})) {
        Tally t("kernel_quasi_symmetry");
        for (std::size_t i = 0; i < ns; ++i) {
            Rng rng = next_rng();
            const double gamma = rng.uniform(0.05, 0.95);
            const double bound = std::pow(c_adj, 1.0 - gamma);
            tally_parallel(t, n, [&](std::size_t x, Tally& part) {
                for (std::size_t y = 0; y < n; ++y) {
                    if (x == y) continue;
                    part.le(kernel_gamma(s, gamma, x, y), bound * kernel_gamma(s, gamma, y, x));
                }
            });
        }
        report.invariants.push_back(t.finish());
    }
    if (begin_block({"kernel_potential_type"})) {
        Tally t("kernel_potential_type");
        const int e = ceil_log2(6.0 * a0 * a0) + 1;
        for (double gamma : kGammas) {
            const GammaKernel k(s, gamma);
            const double k1 = std::pow(c_mu, e * (1.0 - gamma));
            tally_parallel(t, n, [&](std::size_t y, Tally& part) {
                const auto nb = s.neighbors(y);
                const auto d = s.sorted_distances(y);
                // prefix minima of K(x', y) over x' != y in distance order
                std::vector<double> pmin(n, std::numeric_limits<double>::infinity());
                for (std::size_t i = 1; i < n; ++i) pmin[i] = std::min(pmin[i - 1], k(nb[i], y));
                for (std::size_t x = 0; x < n; ++x) {
                    if (x == y) continue;
                    const std::size_t reach =
                        static_cast<std::size_t>(std::upper_bound(d.begin(), d.end(), 2.0 * s.dist(x, y)) - d.begin());
                    part.le(k(x, y), k1 * pmin[reach - 1]);
                }
                // second slot: x = index, y' ranges over neighbors(x) within 2 rho(x, y)
                const PointId x = y;
                for (std::size_t i = 1; i < n; ++i) pmin[i] = std::min(pmin[i - 1], k(x, nb[i]));
                for (std::size_t w = 0; w < n; ++w) {
                    if (w == x) continue;
                    const std::size_t reach =
                        static_cast<std::size_t>(std::upper_bound(d.begin(), d.end(), 2.0 * s.dist(x, w)) - d.begin());
                    part.le(k(x, w), k1 * pmin[reach - 1]);
                }
            });
        }
        report.invariants.push_back(t.finish());
    }
    if (begin_block({"sublevel_classification", "sublevel_verbatim_measure"})) {
        Tally t("sublevel_classification");
        Tally flags("sublevel_verbatim_measure");
        const auto levels = suite_levels(s);
        for (std::size_t y = 0; y < n; ++y) {
            for (double level : levels) {
                const SublevelResult r = sublevel_set(s, y, level);
                std::vector<PointId> brute;
                for (std::size_t x = 0; x < n; ++x) {
                    const double m = x == y ? 0.0 : s.ball_measure(y, s.dist(y, x));
                    if (m < level) brute.push_back(x);
                }
                std::ostringstream where;
                where << "y=" << y << " t=" << level;
                t.truth(brute == r.members, "members differ at " + where.str());
                switch (r.shape) {
                    case SublevelShape::singleton:
                        t.truth(r.members.size() == 1 && s.mass(y) >= level, "singleton at " + where.str());
                        break;
                    case SublevelShape::open_ball:
                        t.le(r.measure, level, kRoundoff, "open ball measure");
                        break;
                    case SublevelShape::closed_ball:
                        t.le(r.measure, c_mu * level, kRoundoff, "closed ball measure");
                        if (r.measure > level) {
                            std::ostringstream os;
                            os << where.str() << " measure=" << r.measure;
                            flags.flag(os.str());
                        }
                        break;
                    case SublevelShape::whole_space:
                        t.le(s.total_mass(), level, kRoundoff, "whole space measure");
                        break;
                }
            }
        }
        report.invariants.push_back(t.finish());
        report.invariants.push_back(flags.finish());
    }
    if (begin_block({"kernel_weak_norm_bound", "kernel_weak_norm_crosscheck"})) {
        Tally bound("kernel_weak_norm_bound");
        Tally cross("kernel_weak_norm_crosscheck");
        for (std::size_t i = 0; i < ns; ++i) {
            Rng rng = next_rng();
            const double gamma = kGammas[i % 3];
            const Weight u = random_positive(rng, n, 1e-2, 1e2);
            const FunctionVector mu = maximal(s, u, MaximalMode::full);
            const GammaKernel k(s, gamma);
            const double q0 = 1.0 / (1.0 - gamma);
            std::vector<double> norms(n), crosses(n);
            parallel_for(n, [&](std::size_t y) {
                FunctionVector col(n);
                for (std::size_t x = 0; x < n; ++x) col[x] = k(x, y);
                norms[y] = kernel_weak_norm(s, gamma, y, u);
                crosses[y] = weak_lorentz_norm(s, col, u, q0);
            });
            for (std::size_t y = 0; y < n; ++y) {
                bound.le(norms[y], std::pow(c_adj * mu[y], 1.0 - gamma));
                cross.eq(norms[y], crosses[y]);
            }
        }
        report.invariants.push_back(bound.finish());
        report.invariants.push_back(cross.finish());
    }
    if (begin_block({"t_gamma_two_forms", "linearity_monotonicity", "centered_le_full", "variant_chains"})) {
        Tally two("t_gamma_two_forms");
        Tally lin("linearity_monotonicity");
        Tally cent("centered_le_full");
        Tally chains("variant_chains");
        std::optional<AhlforsConstants> ac;
        if (n > 1) {
            double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
            for (std::size_t x = 0; x < n; ++x) {
                dmin = std::min(dmin, s.sorted_distances(x)[1]);
                dmax = std::max(dmax, s.sorted_distances(x)[n - 1]);
            }
            ac = ahlfors_constants(s, 1.0, dmin, dmax);
        }
        for (std::size_t i = 0; i < ns; ++i) {
            Rng rng = next_rng();
            const double gamma = rng.uniform(0.05, 0.95);
            const FunctionVector f = random_positive(rng, n, 1e-3, 1e3);
            const FunctionVector g = random_positive(rng, n, 1e-3, 1e3);
            const double a = rng.uniform(0.1, 10.0), b = rng.uniform(0.1, 10.0);
            OperatorParams op;
            op.gamma = gamma;
            const FunctionVector tf = apply_fractional(s, FractionalKind::t_gamma, op, f);
            const FunctionVector tg = apply_fractional(s, FractionalKind::t_gamma, op, g);
            const TGammaParts parts = t_gamma_parts(s, gamma, f);
            FunctionVector combo(n), sum(n);
            for (std::size_t x = 0; x < n; ++x) {
                combo[x] = a * f[x] + b * g[x];
                sum[x] = f[x] + g[x];
            }
            const FunctionVector tc = apply_fractional(s, FractionalKind::t_gamma, op, combo);
            const FunctionVector ts = apply_fractional(s, FractionalKind::t_gamma, op, sum);
            for (std::size_t x = 0; x < n; ++x) {
                two.eq(tf[x], parts.off_diagonal[x] + parts.atom[x]);
                lin.eq(tc[x], a * tf[x] + b * tg[x]);
                lin.le(tf[x], ts[x]);
                lin.truth(tf[x] >= 0.0, "negative T f");
            }
            const FunctionVector mc = maximal(s, f, MaximalMode::centered);
            const FunctionVector mf = maximal(s, f, MaximalMode::full);
            for (std::size_t x = 0; x < n; ++x) cent.le(mc[x], mf[x]);
            if (ac) {
                OperatorParams v;
                v.gamma = gamma;
                v.alpha = gamma;
                v.s = 1.0 - gamma;
                const FunctionVector ri = apply_fractional(s, FractionalKind::riesz_s, v, f);
                const FunctionVector fr = apply_fractional(s, FractionalKind::frak_alpha, v, f);
                const auto& off = parts.off_diagonal;
                for (std::size_t x = 0; x < n; ++x) {
                    chains.le(ri[x], std::pow(ac->upper, 1.0 - gamma) * off[x]);
                    chains.le(off[x], std::pow(ac->upper, gamma) * fr[x]);
                    chains.le(fr[x], std::pow(ac->lower, -gamma) * off[x]);
                    chains.le(off[x], std::pow(ac->lower, -(1.0 - gamma)) * ri[x]);
                }
            }
        }
        report.invariants.push_back(two.finish());
        report.invariants.push_back(lin.finish());
        report.invariants.push_back(cent.finish());
        report.invariants.push_back(chains.finish());
    }
    if (begin_block({"weight_identities", "constant_ordering"})) {
        Tally ident("weight_identities");
        Tally order("constant_ordering");
        for (std::size_t i = 0; i < ns; ++i) {
            Rng rng = next_rng();
            const Weight w = random_positive(rng, n, 0.1, 10.0);
            const ExponentPair pq = random_pair(rng);
            ident.le(weight_identity_errors(s, w, pq).max(), 1e-10, 0.0, "identity error");
            const double a1 = weight_constant(s, w, WeightClassSpec::a1()).value;
            for (double p : kExponents) {
                const double ap = weight_constant(s, w, WeightClassSpec::ap(p)).value;
                order.le(ap, a1, kRoundoff, "Ap <= A1");
                order.le(1.0, ap, kRoundoff, "1 <= Ap");
            }
        }
        report.invariants.push_back(ident.finish());
        report.invariants.push_back(order.finish());
    }
    if (begin_block({"power_weight_lp_identity", "halving_radii"})) {
        Tally ft("power_weight_lp_identity");
        Tally halving("halving_radii");
        for (std::size_t i = 0; i < ns; ++i) {
            Rng rng = next_rng();
            const double t = rng.uniform(0.05, 0.95);
            const PointId c = rng.below(n);
            const auto ends = s.shell_ends(c);
            const std::size_t shell = rng.below(ends.size());
            const double p = kExponents[rng.below(4)];
            const Weight u = power_weight(s, t, c);
            FunctionVector chi(n, 0.0);
            double ub = 0.0;
            for (std::size_t k = 0; k < ends[shell]; ++k) {
                const PointId x = s.neighbors(c)[k];
                chi[x] = 1.0;
                ub += u[x] * s.mass(x);
            }
            ft.eq(weighted_lp_norm(s, chi, u, p), std::pow(ub, 1.0 / p));

            const double R = s.shell_radius(c, shell);
            try {
                const auto radii = halving_radii(s, c, R, c_mu);
                for (std::size_t k = 0; k + 1 < radii.size(); ++k) {
                    const double m0 = s.ball_measure(c, radii[k]);
                    const double m1 = s.ball_measure(c, radii[k + 1]);
                    halving.truth(m1 < m0 / 2.0, "halving not strict");
                    halving.le(m0, 2.0 * c_mu * m1, kRoundoff, "reverse halving");
                }
                halving.truth(true);
            } catch (const InvariantViolation& e) {
                halving.truth(false, e.what());
            }
        }
        report.invariants.push_back(ft.finish());
        report.invariants.push_back(halving.finish());
    }
    if (begin_block({"necessity_bound"})) {
        Tally t("necessity_bound");
        const double dil = 3.0 * a0 * a0;
        for (double gamma : kGammas) {
            const GammaKernel k(s, gamma);
            tally_parallel(t, n, [&](std::size_t c, Tally& part) {
                const auto nb = s.neighbors(c);
                const auto cum = s.cumulative_mass(c);
                std::vector<double> g(n, 0.0);
                std::size_t filled = 0;
                for_each_shell(s, c, [&](std::size_t shell, std::size_t end) {
                    for (; filled < end; ++filled) {
                        const PointId y = nb[filled];
                        for (std::size_t x = 0; x < n; ++x) g[x] += k(x, y) * s.mass(y);
                    }
                    const double mb = cum[end - 1];
                    const double rhs = mb * std::pow(s.ball_measure(c, dil * s.shell_radius(c, shell)), gamma - 1.0);
                    for (std::size_t i = 0; i < end; ++i) part.le(rhs, g[nb[i]]);
                });
            });
        }
        report.invariants.push_back(t.finish());
    }
    if (begin_block({"ratio_homogeneity"})) {
        Tally t("ratio_homogeneity");
        for (std::size_t i = 0; i < ns; ++i) {
            Rng rng = next_rng();
            const double gamma = rng.uniform(0.05, 0.95);
            const ExponentPair pq = random_pair(rng);
            const Weight w = random_positive(rng, n, 0.1, 10.0);
            const FunctionVector f = random_positive(rng, n, 1e-3, 1e3);
            const double c = rng.log_uniform(1e-3, 1e3);
            FunctionVector cf(f);
            for (double& x : cf) x *= c;
            const GammaKernel k(s, gamma);
            for (NormTarget target : {NormTarget::strong, NormTarget::weak}) {
                t.eq(operator_ratio(s, k, pq, w, f, target), operator_ratio(s, k, pq, w, cf, target));
            }
        }
        report.invariants.push_back(t.finish());
    }
    if (begin_block({"snowflake_validity"})) {
        Tally t("snowflake_validity");
        for (double eps : {0.25, 0.5, 0.75}) {
            try {
                validate_space(snowflake(s, eps));
                t.truth(true);
            } catch (const std::exception& e) {
                t.truth(false, std::string("snowflake ") + std::to_string(eps) + ": " + e.what());
            }
        }
        report.invariants.push_back(t.finish());
    }
    return report;
}

}  // namespace fracint
