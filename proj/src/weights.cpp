#include "fracint/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fracint/errors.hpp"
#include "fracint/parallel.hpp"

namespace fracint {

void check_weight(const FiniteSpace& s, std::span<const double> w, const char* what) {
    if (w.size() != s.size()) {
        throw ParameterError(std::string(what) + " has " + std::to_string(w.size()) + " entries, space has " +
                             std::to_string(s.size()));
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!(std::isfinite(w[i]) && w[i] > 0.0)) {
            throw ParameterError(std::string(what) + " must be finite and positive (entry " + std::to_string(i) +
                                 ")");
        }
    }
}

double conjugate_exponent(double p) {
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    return p / (p - 1.0);
}

ExponentPair ExponentPair::make(double p, double q) {
    require(p >= 1.0 && std::isfinite(p), "p must lie in [1, inf)");
    require(q >= p && std::isfinite(q), "q must satisfy p <= q < inf");
    ExponentPair e;
    e.p = p;
    e.q = q;
    e.p_conj = conjugate_exponent(p);
    e.q_conj = conjugate_exponent(q);
    e.r = 1.0 + q / e.p_conj;
    e.s_exp = 1.0 + e.p_conj / q;
    return e;
}

double weighted_lp_norm(const FiniteSpace& s, std::span<const double> f, std::span<const double> density,
                        double p) {
    require(p >= 1.0, "weighted_lp_norm requires p >= 1");
    require(f.size() == s.size() && density.size() == s.size(), "vector length does not match the space");
    double acc = 0.0;
    for (std::size_t x = 0; x < f.size(); ++x) {
        if (f[x] == 0.0) continue;
        acc += std::pow(std::abs(f[x]), p) * density[x] * s.mass(x);
    }
    return std::pow(acc, 1.0 / p);
}

double weak_lorentz_norm(const FiniteSpace& s, std::span<const double> f, std::span<const double> density,
                         double q) {
    require(q >= 1.0, "weak_lorentz_norm requires q >= 1");
    require(f.size() == s.size() && density.size() == s.size(), "vector length does not match the space");
    std::vector<std::size_t> idx(f.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        const double fa = std::abs(f[a]);
        const double fb = std::abs(f[b]);
        return fa > fb || (fa == fb && a < b);
    });
    double best = 0.0;
    double level_mass = 0.0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        const double v = std::abs(f[idx[k]]);
        if (v == 0.0) break;
        level_mass += density[idx[k]] * s.mass(idx[k]);
        if (k + 1 < idx.size() && std::abs(f[idx[k + 1]]) == v) continue;
        best = std::max(best, v * std::pow(level_mass, 1.0 / q));
    }
    return best;
}

Weight power_of(std::span<const double> w, double e) {
    Weight out(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        out[i] = std::pow(w[i], e);
    }
    return out;
}

std::string_view to_string(WeightClass c) {
    switch (c) {
        case WeightClass::a1: return "A1";
        case WeightClass::ap: return "Ap";
        case WeightClass::apq: return "Apq";
        case WeightClass::a1q: return "A1q";
    }
    return "unknown";
}

std::optional<WeightClass> parse_weight_class(std::string_view text) {
    if (text == "a1" || text == "A1") return WeightClass::a1;
    if (text == "ap" || text == "Ap") return WeightClass::ap;
    if (text == "apq" || text == "Apq") return WeightClass::apq;
    if (text == "a1q" || text == "A1q") return WeightClass::a1q;
    return std::nullopt;
}

BallSup ball_average_sup(const FiniteSpace& s, std::span<const double> a, std::span<const double> b, double e) {
    const std::size_t n = s.size();
    std::vector<BallSup> per_center(n);
    parallel_for(n, [&](std::size_t c) {
        const auto nb = s.neighbors(c);
        const auto cum = s.cumulative_mass(c);
        BallSup best{-std::numeric_limits<double>::infinity(), c, 0};
        double ia = 0.0;
        double ib = 0.0;
        std::size_t filled = 0;
        for_each_shell(s, c, [&](std::size_t k, std::size_t end) {
            for (; filled < end; ++filled) {
                ia += a[nb[filled]] * s.mass(nb[filled]);
                ib += b[nb[filled]] * s.mass(nb[filled]);
            }
            const double m = cum[end - 1];
            const double v = (ia / m) * std::pow(ib / m, e);
            if (v > best.value) {
                best.value = v;
                best.shell = k;
            }
        });
        per_center[c] = best;
    });
    BallSup best = per_center[0];
    for (std::size_t c = 1; c < n; ++c) {
        if (per_center[c].value > best.value) best = per_center[c];
    }
    return best;
}

namespace {

ConstantsReport from_ball(const FiniteSpace& s, WeightClass cls, const BallSup& b) {
    ConstantsReport r;
    r.cls = cls;
    r.value = b.value;
    r.witness_center = b.center;
    r.witness_radius = s.shell_radius(b.center, b.shell);
    r.witness_count = s.shell_ends(b.center)[b.shell];
    return r;
}

ConstantsReport a1_type(const FiniteSpace& s, std::span<const double> v, std::span<const double> inv_v,
                        WeightClass cls, MaximalMode mode) {
    std::vector<MaximalWitness> wit;
    const FunctionVector mv = maximal(s, v, mode, &wit);
    ConstantsReport r;
    r.cls = cls;
    r.mode = mode;
    r.value = -std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < s.size(); ++x) {
        const double ratio = mv[x] * inv_v[x];
        if (ratio > r.value) {
            r.value = ratio;
            r.witness_point = x;
            r.witness_center = wit[x].center;
            r.witness_radius = s.shell_radius(wit[x].center, wit[x].shell);
            r.witness_count = s.shell_ends(wit[x].center)[wit[x].shell];
        }
    }
    return r;
}

}  // namespace

ConstantsReport weight_constant(const FiniteSpace& s, std::span<const double> w, const WeightClassSpec& spec) {
    check_weight(s, w);
    ConstantsReport r;
    switch (spec.cls) {
        case WeightClass::a1: {
            const Weight inv = power_of(w, -1.0);
            r = a1_type(s, w, inv, WeightClass::a1, spec.mode);
            break;
        }
        case WeightClass::a1q: {
            require(spec.q >= 1.0, "A1q requires q >= 1");
            r = a1_type(s, power_of(w, spec.q), power_of(w, -spec.q), WeightClass::a1q, spec.mode);
            break;
        }
        case WeightClass::ap: {
            require(spec.p > 1.0 && std::isfinite(spec.p), "Ap requires 1 < p < inf");
            const double pc = conjugate_exponent(spec.p);
            r = from_ball(s, WeightClass::ap, ball_average_sup(s, w, power_of(w, 1.0 - pc), spec.p - 1.0));
            break;
        }
        case WeightClass::apq: {
            require(spec.p > 1.0 && spec.q >= spec.p && std::isfinite(spec.q), "Apq requires 1 < p <= q < inf");
            const double pc = conjugate_exponent(spec.p);
            r = from_ball(s, WeightClass::apq,
                          ball_average_sup(s, power_of(w, spec.q), power_of(w, -pc), spec.q / pc));
            break;
        }
    }
    if (r.value < 1.0 - kRoundoff * 1e3) {
        throw InvariantViolation("weight constant below 1: " + std::to_string(r.value));
    }
    return r;
}

namespace {

double rel_diff(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace

double IdentityErrors::max() const {
    return std::max({apq_vs_ar, apq_vs_dual, as_vs_apq, a1q_vs_a1});
}

IdentityErrors weight_identity_errors(const FiniteSpace& s, std::span<const double> w, const ExponentPair& pq,
                                      MaximalMode mode) {
    require(pq.p > 1.0, "weight identities need p > 1");
    const Weight wq = power_of(w, pq.q);
    const double apq = weight_constant(s, w, WeightClassSpec::apq(pq.p, pq.q)).value;
    IdentityErrors e;
    e.apq_vs_ar = rel_diff(apq, weight_constant(s, wq, WeightClassSpec::ap(pq.r)).value);
    const double dual = weight_constant(s, power_of(w, -1.0), WeightClassSpec::apq(pq.q_conj, pq.p_conj)).value;
    e.apq_vs_dual = rel_diff(apq, std::pow(dual, pq.q / pq.p_conj));
    const double as = weight_constant(s, power_of(w, -pq.p_conj), WeightClassSpec::ap(pq.s_exp)).value;
    e.as_vs_apq = rel_diff(as, std::pow(apq, pq.p_conj / pq.q));
    const double a1q = weight_constant(s, w, WeightClassSpec::a1q(pq.q, mode)).value;
    e.a1q_vs_a1 = rel_diff(a1q, weight_constant(s, wq, WeightClassSpec::a1(mode)).value);
    return e;
}

Weight power_weight(const FiniteSpace& s, double t, PointId center) {
    require(t > 0.0 && t < 1.0, "power weight requires 0 < t < 1");
    require(center < s.size(), "power weight centre out of range");
    Weight u(s.size());
    for (std::size_t x = 0; x < s.size(); ++x) {
        u[x] = std::pow(s.inner_measure(center, x), t - 1.0);
    }
    return u;
}

EpsilonPoint epsilon_point(const FiniteSpace& s, double eps) {
    require(eps > 0.0 && eps < 1.0, "epsilon must lie in (0, 1)");
    EpsilonPoint r;
    PointId best = 0;
    for (std::size_t x = 1; x < s.size(); ++x) {
        if (s.mass(x) < s.mass(best)) best = x;
    }
    r.point = best;
    r.best_ratio = s.total_mass() / s.mass(best);
    const auto cum = s.cumulative_mass(best);
    const auto ends = s.shell_ends(best);
    const double target = 1.0 / eps;
    r.feasible = r.best_ratio > target;
    std::size_t shell = ends.size() - 1;
    if (r.feasible) {
        for (std::size_t k = 0; k < ends.size(); ++k) {
            if (cum[ends[k] - 1] / s.mass(best) > target) {
                shell = k;
                break;
            }
        }
    }
    r.radius = s.shell_radius(best, shell);
    r.count = ends[shell];
    r.ratio = cum[ends[shell] - 1] / s.mass(best);
    return r;
}

std::vector<double> halving_radii(const FiniteSpace& s, PointId center, double R, double c_mu, int cap) {
    require(R > 0.0, "halving radii need R > 0");
    require(center < s.size(), "centre out of range");
    double m = s.ball_measure(center, R);
    require(m > 0.0, "initial ball is empty");
    std::vector<double> radii{R};
    int k = 0;
    while (m > 2.0 * s.mass(center)) {
        int next = k + 1;
        double m_next = 0.0;
        for (; next <= cap; ++next) {
            m_next = s.ball_measure(center, std::ldexp(R, -next));
            if (m_next < m / 2.0) break;
        }
        if (next > cap) break;
        if (!(m_next < m / 2.0) || m > 2.0 * c_mu * m_next * (1.0 + kRoundoff)) {
            throw InvariantViolation("halving estimates fail at radius " + std::to_string(std::ldexp(R, -next)));
        }
        radii.push_back(std::ldexp(R, -next));
        m = m_next;
        k = next;
    }
    return radii;
}

std::vector<double> halving_radii(const FiniteSpace& s, PointId center, double R) {
    return halving_radii(s, center, R, doubling_constant(s).c_mu);
}

}  // namespace fracint
