#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fracint/space.hpp"

namespace fracint {

using FunctionVector = std::vector<double>;

struct OperatorParams {
    double gamma = 0.5;  // T_gamma order, 0 < gamma < 1
    double s = 1.0;      // I^s exponent
    double alpha = 0.5;  // frak-T^alpha exponent

    /// Weak-type exponent 1 / (1 - gamma).
    double q0() const { return 1.0 / (1.0 - gamma); }
};

void check_gamma(double gamma);

enum class FractionalKind { t_gamma, riesz_s, frak_alpha };

/// K_gamma(x, y) = mu(B(x, rho(x,y)))^(gamma-1), with mu({x})^(gamma-1) on the diagonal.
double kernel_gamma(const FiniteSpace& s, double gamma, PointId x, PointId y);

// Dense table of K_gamma for repeated application.
class GammaKernel {
public:
    GammaKernel(const FiniteSpace& s, double gamma);

    double gamma() const noexcept { return gamma_; }
    std::size_t size() const noexcept { return n_; }
    double operator()(PointId x, PointId y) const noexcept { return k_[x * n_ + y]; }
    std::span<const double> row(PointId x) const noexcept { return {k_.data() + x * n_, n_}; }

    /// (T f)(x) = sum_y K(x, y) f(y) mu({y}), summed in increasing y.
    FunctionVector apply(std::span<const double> f) const;

private:
    std::size_t n_;
    double gamma_;
    std::vector<double> k_;
    std::vector<double> mass_;
};

FunctionVector apply_fractional(const FiniteSpace& s, FractionalKind kind, const OperatorParams& params,
                                std::span<const double> f);

struct TGammaParts {
    FunctionVector off_diagonal;  // sum over y != x
    FunctionVector atom;          // f(x) mu({x})^gamma
};

/// T_gamma in its split form: off-diagonal sum plus the atom term.
TGammaParts t_gamma_parts(const FiniteSpace& s, double gamma, std::span<const double> f);

enum class MaximalMode { full, centered };

std::string_view to_string(MaximalMode m);
std::optional<MaximalMode> parse_maximal_mode(std::string_view text);

struct MaximalWitness {
    PointId center = 0;
    std::size_t shell = 0;  // index into shell_ends(center)
};

/// Hardy-Littlewood maximal function of |f|. full: every ball containing x;
/// centered: balls centred at x. Ties go to the lowest centre, then smallest radius.
FunctionVector maximal(const FiniteSpace& s, std::span<const double> f, MaximalMode mode,
                       std::vector<MaximalWitness>* witness = nullptr);

enum class SublevelShape { singleton, open_ball, closed_ball, whole_space };

std::string_view to_string(SublevelShape shape);

struct SublevelResult {
    std::vector<PointId> members;  // ascending
    SublevelShape shape = SublevelShape::singleton;
    double r_y = 0.0;  // +infinity when no ball at level t excludes a point
    double measure = 0.0;
};

/// E_t = { x : mu(B(y, rho(y, x))) < t } with mu(B(y, 0)) = 0.
SublevelResult sublevel_set(const FiniteSpace& s, PointId y, double t);

/// ||K_gamma(., y)||_{L^{q0,inf}(u)} computed as max over levels m of (u({x : mu(B(x,rho(x,y))) <= m}) / m)^(1/q0).
double kernel_weak_norm(const FiniteSpace& s, double gamma, PointId y, std::span<const double> u);

}  // namespace fracint
