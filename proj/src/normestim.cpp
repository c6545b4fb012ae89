#include "fracint/normestim.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "fracint/errors.hpp"
#include "fracint/parallel.hpp"
#include "fracint/random.hpp"

namespace fracint {

std::string_view to_string(NormTarget t) {
    return t == NormTarget::strong ? "strong" : "weak";
}

namespace {

struct TestingResult {
    double value = 0.0;
    BallWitness witness;
};

// max over balls Q of sigma(Q)^(-1/p) ||chi_Q T(chi_Q sigma)||_{L^q(v)} for the kernel k(x, y).
TestingResult testing_sup(const FiniteSpace& s, const std::function<double(PointId, PointId)>& k, double p,
                          double q, std::span<const double> sigma, std::span<const double> v) {
    const std::size_t n = s.size();
    std::vector<TestingResult> per_center(n);
    parallel_for(n, [&](std::size_t c) {
        const auto nb = s.neighbors(c);
        std::vector<double> g(n, 0.0);
        double sigma_q = 0.0;
        std::size_t filled = 0;
        TestingResult best{-1.0, {c, 0, 0.0}};
        for_each_shell(s, c, [&](std::size_t shell, std::size_t end) {
            for (; filled < end; ++filled) {
                const PointId y = nb[filled];
                const double wy = sigma[y] * s.mass(y);
                sigma_q += wy;
                for (std::size_t x = 0; x < n; ++x) {
                    g[x] += k(x, y) * wy;
                }
            }
            double acc = 0.0;
            for (std::size_t i = 0; i < end; ++i) {
                const PointId x = nb[i];
                acc += std::pow(g[x], q) * v[x] * s.mass(x);
            }
            const double value = std::pow(sigma_q, -1.0 / p) * std::pow(acc, 1.0 / q);
            if (value > best.value) {
                best = {value, {c, end, s.shell_radius(c, shell)}};
            }
        });
        per_center[c] = best;
    });
    TestingResult best = per_center[0];
    for (std::size_t c = 1; c < n; ++c) {
        if (per_center[c].value > best.value) best = per_center[c];
    }
    return best;
}

double strong_or_weak(const FiniteSpace& s, std::span<const double> g, std::span<const double> wq, double q,
                      NormTarget target) {
    if (target == NormTarget::weak) {
        return weak_lorentz_norm(s, g, wq, q);
    }
    return weighted_lp_norm(s, g, wq, q);
}

void normalise(const FiniteSpace& s, FunctionVector& f, std::span<const double> wp, double p) {
    const double norm = weighted_lp_norm(s, f, wp, p);
    if (norm > 0.0) {
        for (double& x : f) x /= norm;
    }
}

struct Candidate {
    double value = -1.0;
    FunctionVector f;
};

class RatioEvaluator {
public:
    RatioEvaluator(const FiniteSpace& s, const GammaKernel& k, const ExponentPair& pq, std::span<const double> w,
                   NormTarget target)
        : s_(s), k_(k), pq_(pq), wp_(power_of(w, pq.p)), wq_(power_of(w, pq.q)), target_(target) {}

    double operator()(std::span<const double> f) const {
        const double den = weighted_lp_norm(s_, f, wp_, pq_.p);
        if (den == 0.0) return 0.0;
        const FunctionVector g = k_.apply(f);
        return strong_or_weak(s_, g, wq_, pq_.q, target_) / den;
    }

    std::span<const double> wp() const { return wp_; }
    std::span<const double> wq() const { return wq_; }

private:
    const FiniteSpace& s_;
    const GammaKernel& k_;
    const ExponentPair& pq_;
    Weight wp_;
    Weight wq_;
    NormTarget target_;
};

// Multiplicative coordinate ascent. Returns true if any move was accepted.
bool refine(Candidate& c, const RatioEvaluator& eval, std::span<const double> factors, int sweeps) {
    bool improved_any = false;
    FunctionVector trial;
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        bool improved = false;
        for (std::size_t i = 0; i < c.f.size(); ++i) {
            for (double factor : factors) {
                trial = c.f;
                if (trial[i] == 0.0) {
                    if (factor <= 1.0) continue;
                    trial[i] = 1e-3 * *std::max_element(c.f.begin(), c.f.end());
                    if (trial[i] == 0.0) continue;
                } else {
                    trial[i] *= factor;
                }
                const double v = eval(trial);
                if (v > c.value) {
                    c.value = v;
                    c.f = trial;
                    improved = true;
                }
            }
        }
        if (!improved) break;
        improved_any = true;
    }
    return improved_any;
}

// Best ball indicator, updating T chi_B incrementally along each centre's shells.
Candidate best_ball(const FiniteSpace& s, const GammaKernel& k, const ExponentPair& pq, const RatioEvaluator& eval,
                    NormTarget target) {
    const std::size_t n = s.size();
    const auto wp = eval.wp();
    const auto wq = eval.wq();
    std::vector<std::pair<double, std::size_t>> per_center(n);
    parallel_for(n, [&](std::size_t c) {
        const auto nb = s.neighbors(c);
        std::vector<double> g(n, 0.0);
        double den = 0.0;
        std::size_t filled = 0;
        std::pair<double, std::size_t> best{-1.0, 0};
        for_each_shell(s, c, [&](std::size_t, std::size_t end) {
            for (; filled < end; ++filled) {
                const PointId y = nb[filled];
                den += wp[y] * s.mass(y);
                for (std::size_t x = 0; x < n; ++x) {
                    g[x] += k(x, y) * s.mass(y);
                }
            }
            const double v = strong_or_weak(s, g, wq, pq.q, target) / std::pow(den, 1.0 / pq.p);
            if (v > best.first) best = {v, end};
        });
        per_center[c] = best;
    });
    std::size_t bc = 0;
    for (std::size_t c = 1; c < n; ++c) {
        if (per_center[c].first > per_center[bc].first) bc = c;
    }
    Candidate out;
    out.f.assign(n, 0.0);
    const auto nb = s.neighbors(bc);
    for (std::size_t i = 0; i < per_center[bc].second; ++i) {
        out.f[nb[i]] = 1.0;
    }
    out.value = eval(out.f);
    return out;
}

Candidate best_of(std::vector<FunctionVector> fs, const RatioEvaluator& eval) {
    std::vector<double> values(fs.size());
    parallel_for(fs.size(), [&](std::size_t i) { values[i] = eval(fs[i]); });
    Candidate out;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        if (values[i] > out.value) {
            out.value = values[i];
            out.f = fs[i];
        }
    }
    return out;
}

}  // namespace

TestingConstants testing_constant(const FiniteSpace& s, double gamma, const ExponentPair& pq,
                                  std::span<const double> sigma, std::span<const double> v) {
    require(pq.p > 1.0 && pq.q >= pq.p && std::isfinite(pq.q), "testing constants need 1 < p <= q < inf");
    check_weight(s, sigma, "sigma");
    check_weight(s, v, "v");
    const GammaKernel k(s, gamma);
    const auto forward = testing_sup(s, [&](PointId x, PointId y) { return k(x, y); }, pq.p, pq.q, sigma, v);
    const auto dual =
        testing_sup(s, [&](PointId x, PointId y) { return k(y, x); }, pq.q_conj, pq.p_conj, v, sigma);
    return {forward.value, dual.value, forward.witness, dual.witness};
}

double operator_ratio(const FiniteSpace& s, const GammaKernel& k, const ExponentPair& pq,
                      std::span<const double> w, std::span<const double> f, NormTarget target) {
    check_weight(s, w);
    require(f.size() == s.size(), "function length does not match the space");
    return RatioEvaluator(s, k, pq, w, target)(f);
}

NormEstimate norm_lower_bound(const FiniteSpace& s, double gamma, const ExponentPair& pq,
                              std::span<const double> w, NormTarget target, const NormBudget& budget) {
    check_weight(s, w);
    require(budget.sweeps >= 0, "refinement budget must be non-negative");
    const std::size_t n = s.size();
    const GammaKernel k(s, gamma);
    const RatioEvaluator eval(s, k, pq, w, target);

    struct Family {
        std::string tag;
        Candidate best;
    };
    std::vector<Family> families;
    if (budget.balls) {
        families.push_back({"ball", best_ball(s, k, pq, eval, target)});
    }
    if (budget.power && !budget.t_values.empty()) {
        const PointId center = epsilon_point(s, 0.5).point;
        std::vector<FunctionVector> fs;
        for (double t : budget.t_values) {
            fs.push_back(power_of(power_weight(s, t, center), gamma));
        }
        families.push_back({"power", best_of(std::move(fs), eval)});
    }
    if (budget.random && budget.random_count > 0) {
        std::vector<FunctionVector> fs(static_cast<std::size_t>(budget.random_count));
        for (std::size_t i = 0; i < fs.size(); ++i) {
            Rng rng = Rng::stream(budget.seed, i);
            fs[i].resize(n);
            for (double& x : fs[i]) x = rng.log_uniform(1e-3, 1e3);
        }
        families.push_back({"random", best_of(std::move(fs), eval)});
    }

    NormEstimate out;
    out.witness.assign(n, 0.0);
    for (auto& fam : families) {
        if (fam.best.f.empty()) continue;
        const bool refined = refine(fam.best, eval, budget.factors, budget.sweeps);
        if (fam.best.value > out.value) {
            out.value = fam.best.value;
            out.witness = fam.best.f;
            out.family_tag = fam.tag;
            out.refined = refined;
        }
    }
    normalise(s, out.witness, eval.wp(), pq.p);
    out.value = eval(out.witness);
    return out;
}

double exact_norm_tiny(const FiniteSpace& s, double gamma, const ExponentPair& pq, std::span<const double> w,
                       NormTarget target, int grid_res) {
    const std::size_t n = s.size();
    if (n > kTinyOracleMaxPoints) {
        throw ParameterError("exact_norm_tiny handles at most " + std::to_string(kTinyOracleMaxPoints) +
                             " points, got " + std::to_string(n));
    }
    require(grid_res >= 16, "grid resolution must be at least 16");
    check_weight(s, w);
    const GammaKernel k(s, gamma);
    const RatioEvaluator eval(s, k, pq, w, target);

    // Directions with max coordinate == grid_res cover every ray of the non-negative orthant.
    constexpr std::size_t kSeeds = 8;
    std::vector<Candidate> top;
    std::vector<int> digits(n, 0);
    FunctionVector f(n);
    while (true) {
        std::size_t i = 0;
        while (i < n && digits[i] == grid_res) {
            digits[i] = 0;
            ++i;
        }
        if (i == n) break;
        ++digits[i];
        if (*std::max_element(digits.begin(), digits.end()) != grid_res) continue;
        for (std::size_t j = 0; j < n; ++j) f[j] = digits[j];
        const double v = eval(f);
        if (top.size() < kSeeds || v > top.back().value) {
            Candidate c{v, f};
            auto pos = std::upper_bound(top.begin(), top.end(), c,
                                        [](const Candidate& a, const Candidate& b) { return a.value > b.value; });
            top.insert(pos, std::move(c));
            if (top.size() > kSeeds) top.pop_back();
        }
    }

    double best = 0.0;
    for (Candidate& c : top) {
        // zero coordinates cannot move under multiplicative steps; start them far below the max
        const double floor = *std::max_element(c.f.begin(), c.f.end()) * 1e-12;
        for (double& x : c.f) x = std::max(x, floor);
        c.value = eval(c.f);
        for (double step : {16.0, 4.0, 2.0, 1.1, 1.01, 1.001, 1.0001, 1.00001}) {
            const double factors[] = {1.0 / step, step};
            refine(c, eval, factors, 10000);
        }
        best = std::max(best, c.value);
    }
    return best;
}

}  // namespace fracint
