#pragma once

#include <cmath>
#include <vector>

#include "fracint/random.hpp"
#include "fracint/space.hpp"

namespace fixtures {

using fracint::FiniteSpace;

// Points on a line with the absolute-difference metric.
inline FiniteSpace line(const std::vector<double>& x, const std::vector<double>& mass) {
    const std::size_t n = x.size();
    std::vector<double> d(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) d[i * n + j] = std::abs(x[i] - x[j]);
    }
    return FiniteSpace::create(std::move(d), mass);
}

// Coordinates {0, 1, 3}, unit masses.
inline FiniteSpace p3() { return line({0, 1, 3}, {1, 1, 1}); }

inline FiniteSpace single(double mass = 1.0) { return FiniteSpace::create({0.0}, {mass}); }

// Random quasi-metric space: random points in the plane, distances raised to a power in [1, 2]
// (a quasi-metric), random masses.
inline FiniteSpace random_space(std::uint64_t seed, std::size_t n) {
    fracint::Rng rng(seed);
    const double power = rng.uniform(1.0, 2.0);
    std::vector<double> x(n), y(n), mass(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = rng.uniform();
        y[i] = rng.uniform();
        mass[i] = rng.log_uniform(0.1, 10.0);
    }
    std::vector<double> d(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            d[i * n + j] = std::pow(std::hypot(x[i] - x[j], y[i] - y[j]), power);
        }
    }
    return FiniteSpace::create(std::move(d), std::move(mass));
}

inline std::vector<double> random_positive(fracint::Rng& rng, std::size_t n, double lo = 1e-2, double hi = 1e2) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.log_uniform(lo, hi);
    return v;
}

inline bool close(double a, double b, double rel = 1e-12) {
    return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace fixtures
