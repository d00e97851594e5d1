#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the library's numerics, so agreement is a genuine cross-check.

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, std::size_t n = 20000) {
    if (n % 2 == 1) ++n;
    const double h = (b - a) / static_cast<double>(n);
    double s = f(a) + f(b);
    for (std::size_t i = 1; i < n; ++i) s += f(a + h * static_cast<double>(i)) * (i % 2 == 1 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// ∫_a^∞ f(x) dx via x = a + t/(1−t), Simpson on t ∈ [0, 1−ε].
inline double simpson_to_inf(const std::function<double(double)>& f, double a, std::size_t n = 200000) {
    auto g = [&](double t) {
        const double u = 1.0 - t;
        return f(a + t / u) / (u * u);
    };
    return simpson(g, 0.0, 1.0 - 1e-7, n);
}

inline double central_diff(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Pareto II closed forms written out directly.
struct Lomax {
    double a;
    double l;
    double sbar(double x) const { return std::pow(1.0 + x / l, -a); }
    double pdf(double x) const { return a / l * std::pow(1.0 + x / l, -a - 1.0); }
    double mean() const { return l / (a - 1.0); }
    double quantile(double u) const { return l * (std::pow(1.0 - u, -1.0 / a) - 1.0); }
    double nu1(double d) const { return l / (a - 1.0) * std::pow(1.0 + d / l, 1.0 - a); }
    double nu2(double d) const {
        return 2.0 * l * l / ((a - 1.0) * (a - 2.0)) * std::pow(1.0 + d / l, 2.0 - a);
    }
    double mu1(double d) const { return mean() - nu1(d); }
    // E(X∧d)² = 2λ²∫₁^Y (y−1)y^(−α) dy with Y = 1 + d/λ.
    double mu2(double d) const {
        const double y = 1.0 + d / l;
        auto prim = [&](double t) { return std::pow(t, 2.0 - a) / (2.0 - a) - std::pow(t, 1.0 - a) / (1.0 - a); };
        return 2.0 * l * l * (prim(y) - prim(1.0));
    }
    double var_capped(double d) const { return mu2(d) - mu1(d) * mu1(d); }
    double var_excess(double d) const { return nu2(d) - nu1(d) * nu1(d); }
};

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

// Normal quantile by bisection on erfc.
inline double normal_quantile(double p) {
    double lo = -40.0;
    double hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (normal_cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Dense-grid argmin of f over [lo, hi].
inline double grid_argmin(const std::function<double(double)>& f, double lo, double hi, std::size_t n) {
    double best_x = lo;
    double best = f(lo);
    for (std::size_t i = 1; i <= n; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
        const double v = f(x);
        if (v < best) {
            best = v;
            best_x = x;
        }
    }
    return best_x;
}

// Golden-section minimum, used to polish grid_argmin.
inline double golden(const std::function<double(double)>& f, double a, double b, double tol) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - r * (b - a);
    double d = a + r * (b - a);
    while (b - a > tol) {
        if (f(c) < f(d)) {
            b = d;
        } else {
            a = c;
        }
        c = b - r * (b - a);
        d = a + r * (b - a);
    }
    return 0.5 * (a + b);
}

} // namespace oracle
