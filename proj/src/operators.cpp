#include "fracint/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fracint/errors.hpp"
#include "fracint/parallel.hpp"

namespace fracint {

namespace {

void check_size(const FiniteSpace& s, std::span<const double> f, const char* what) {
    if (f.size() != s.size()) {
        throw ParameterError(std::string(what) + " has " + std::to_string(f.size()) +
                             " entries, space has " + std::to_string(s.size()));
    }
}

}  // namespace

void check_gamma(double gamma) {
    require(gamma > 0.0 && gamma < 1.0, "gamma must lie in (0, 1)");
}

double kernel_gamma(const FiniteSpace& s, double gamma, PointId x, PointId y) {
    check_gamma(gamma);
    return std::pow(s.inner_measure(x, y), gamma - 1.0);
}

GammaKernel::GammaKernel(const FiniteSpace& s, double gamma)
    : n_(s.size()), gamma_(gamma), k_(s.size() * s.size()), mass_(s.masses().begin(), s.masses().end()) {
    check_gamma(gamma);
    parallel_for(n_, [&](std::size_t x) {
        for (std::size_t y = 0; y < n_; ++y) {
            k_[x * n_ + y] = std::pow(s.inner_measure(x, y), gamma - 1.0);
        }
    });
}

FunctionVector GammaKernel::apply(std::span<const double> f) const {
    if (f.size() != n_) {
        throw ParameterError("function length does not match the kernel size");
    }
    std::vector<double> fm(n_);
    for (std::size_t y = 0; y < n_; ++y) {
        fm[y] = f[y] * mass_[y];
    }
    FunctionVector out(n_);
    parallel_for(n_, [&](std::size_t x) {
        const double* row = k_.data() + x * n_;
        double acc = 0.0;
        for (std::size_t y = 0; y < n_; ++y) {
            acc += row[y] * fm[y];
        }
        out[x] = acc;
    });
    return out;
}

TGammaParts t_gamma_parts(const FiniteSpace& s, double gamma, std::span<const double> f) {
    check_gamma(gamma);
    check_size(s, f, "function");
    const std::size_t n = s.size();
    TGammaParts parts{FunctionVector(n), FunctionVector(n)};
    parallel_for(n, [&](std::size_t x) {
        double acc = 0.0;
        for (std::size_t y = 0; y < n; ++y) {
            if (y == x) continue;
            acc += f[y] * s.mass(y) / std::pow(s.inner_measure(x, y), 1.0 - gamma);
        }
        parts.off_diagonal[x] = acc;
        parts.atom[x] = f[x] * std::pow(s.mass(x), gamma);
    });
    return parts;
}

FunctionVector apply_fractional(const FiniteSpace& s, FractionalKind kind, const OperatorParams& params,
                                std::span<const double> f) {
    check_size(s, f, "function");
    const std::size_t n = s.size();
    switch (kind) {
        case FractionalKind::t_gamma:
            return GammaKernel(s, params.gamma).apply(f);
        case FractionalKind::riesz_s: {
            require(params.s > 0.0, "riesz kernel requires s > 0");
            FunctionVector out(n);
            parallel_for(n, [&](std::size_t x) {
                double acc = 0.0;
                for (std::size_t y = 0; y < n; ++y) {
                    if (y == x) continue;
                    acc += f[y] * s.mass(y) / std::pow(s.dist(x, y), params.s);
                }
                out[x] = acc;
            });
            return out;
        }
        case FractionalKind::frak_alpha: {
            require(params.alpha > 0.0, "frak kernel requires alpha > 0");
            FunctionVector out(n);
            parallel_for(n, [&](std::size_t x) {
                double acc = 0.0;
                for (std::size_t y = 0; y < n; ++y) {
                    if (y == x) continue;
                    acc += std::pow(s.dist(x, y), params.alpha) * f[y] * s.mass(y) / s.inner_measure(x, y);
                }
                out[x] = acc;
            });
            return out;
        }
    }
    throw ParameterError("unknown operator kind");
}

std::string_view to_string(MaximalMode m) {
    return m == MaximalMode::full ? "full" : "centered";
}

std::optional<MaximalMode> parse_maximal_mode(std::string_view text) {
    if (text == "full") return MaximalMode::full;
    if (text == "centered") return MaximalMode::centered;
    return std::nullopt;
}

FunctionVector maximal(const FiniteSpace& s, std::span<const double> f, MaximalMode mode,
                       std::vector<MaximalWitness>* witness) {
    check_size(s, f, "function");
    const std::size_t n = s.size();

    // Ball averages along every centre's shells.
    std::vector<std::vector<double>> averages(n);
    parallel_for(n, [&](std::size_t c) {
        const auto nb = s.neighbors(c);
        const auto cum = s.cumulative_mass(c);
        const auto ends = s.shell_ends(c);
        auto& avg = averages[c];
        avg.resize(ends.size());
        double integral = 0.0;
        std::size_t filled = 0;
        for (std::size_t k = 0; k < ends.size(); ++k) {
            for (; filled < ends[k]; ++filled) {
                integral += std::abs(f[nb[filled]]) * s.mass(nb[filled]);
            }
            avg[k] = integral / cum[ends[k] - 1];
        }
    });

    FunctionVector out(n, -std::numeric_limits<double>::infinity());
    std::vector<MaximalWitness> wit(n);
    if (mode == MaximalMode::centered) {
        for (std::size_t x = 0; x < n; ++x) {
            const auto& avg = averages[x];
            for (std::size_t k = 0; k < avg.size(); ++k) {
                if (avg[k] > out[x]) {
                    out[x] = avg[k];
                    wit[x] = {x, k};
                }
            }
        }
    } else {
        // A point at position k of centre c lies in every shell ending after k, so
        // its best ball at c is a suffix maximum over shells.
        std::vector<double> suffix;
        std::vector<std::size_t> suffix_arg;
        for (std::size_t c = 0; c < n; ++c) {
            const auto& avg = averages[c];
            const auto ends = s.shell_ends(c);
            const auto nb = s.neighbors(c);
            suffix.assign(avg.size(), 0.0);
            suffix_arg.assign(avg.size(), 0);
            for (std::size_t k = avg.size(); k-- > 0;) {
                if (k + 1 == avg.size() || avg[k] >= suffix[k + 1]) {
                    suffix[k] = avg[k];
                    suffix_arg[k] = k;
                } else {
                    suffix[k] = suffix[k + 1];
                    suffix_arg[k] = suffix_arg[k + 1];
                }
            }
            std::size_t shell = 0;
            for (std::size_t pos = 0; pos < n; ++pos) {
                while (ends[shell] <= pos) ++shell;
                const PointId x = nb[pos];
                if (suffix[shell] > out[x]) {
                    out[x] = suffix[shell];
                    wit[x] = {c, suffix_arg[shell]};
                }
            }
        }
    }
    if (witness) {
        *witness = std::move(wit);
    }
    return out;
}

std::string_view to_string(SublevelShape shape) {
    switch (shape) {
        case SublevelShape::singleton: return "singleton";
        case SublevelShape::open_ball: return "open_ball";
        case SublevelShape::closed_ball: return "closed_ball";
        case SublevelShape::whole_space: return "whole_space";
    }
    return "unknown";
}

SublevelResult sublevel_set(const FiniteSpace& s, PointId y, double t) {
    require(t > 0.0, "sublevel level t must be positive");
    const std::size_t n = s.size();
    const auto nb = s.neighbors(y);
    const auto d = s.sorted_distances(y);
    const auto cum = s.cumulative_mass(y);
    const auto ends = s.shell_ends(y);

    SublevelResult r;
    // Shell 0 is {y}: mu(B(y, 0)) = 0 < t. Shell j >= 1 sits at distance
    // d[ends[j-1]] and sees the open ball holding shells 0..j-1.
    std::size_t member_count = ends[0];
    for (std::size_t j = 1; j < ends.size(); ++j) {
        if (cum[ends[j - 1] - 1] < t) {
            member_count = ends[j];
        } else {
            break;
        }
    }
    r.members.assign(nb.begin(), nb.begin() + static_cast<std::ptrdiff_t>(member_count));
    std::sort(r.members.begin(), r.members.end());
    r.measure = cum[member_count - 1];

    // mu(B(y, r)) is constant on (d_j, d_{j+1}] with value cum through shell j.
    if (s.total_mass() < t) {
        r.r_y = std::numeric_limits<double>::infinity();
    } else {
        r.r_y = 0.0;
        for (std::size_t j = 0; j + 1 < ends.size(); ++j) {
            if (cum[ends[j] - 1] < t) {
                r.r_y = d[ends[j]];
            } else {
                break;
            }
        }
    }

    if (r.r_y == 0.0) {
        r.shape = SublevelShape::singleton;
    } else if (std::isinf(r.r_y)) {
        r.shape = SublevelShape::whole_space;
    } else {
        const std::size_t open_count = s.count_within(y, r.r_y);
        const std::size_t closed_count = static_cast<std::size_t>(
            std::upper_bound(d.begin(), d.end(), r.r_y) - d.begin());
        if (member_count == open_count) {
            r.shape = SublevelShape::open_ball;
        } else if (member_count == closed_count) {
            r.shape = SublevelShape::closed_ball;
        } else {
            throw InvariantViolation("sublevel set is neither the open nor the closed ball at r_y");
        }
    }
    if ((r.shape == SublevelShape::singleton && member_count != 1) ||
        (r.shape == SublevelShape::whole_space && member_count != n)) {
        throw InvariantViolation("sublevel shape disagrees with its members");
    }
    return r;
}

double kernel_weak_norm(const FiniteSpace& s, double gamma, PointId y, std::span<const double> u) {
    check_gamma(gamma);
    check_size(s, u, "weight");
    const std::size_t n = s.size();
    std::vector<PointId> by_level(n);
    std::iota(by_level.begin(), by_level.end(), PointId{0});
    std::sort(by_level.begin(), by_level.end(), [&](PointId a, PointId b) {
        const double ma = s.inner_measure(a, y);
        const double mb = s.inner_measure(b, y);
        return ma < mb || (ma == mb && a < b);
    });
    const double inv_q0 = 1.0 - gamma;
    double best = 0.0;
    double u_mass = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const PointId x = by_level[k];
        u_mass += u[x] * s.mass(x);
        const double level = s.inner_measure(x, y);
        if (k + 1 < n && s.inner_measure(by_level[k + 1], y) == level) continue;
        best = std::max(best, std::pow(u_mass / level, inv_q0));
    }
    return best;
}

}  // namespace fracint
