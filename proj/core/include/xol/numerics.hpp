#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace xol::numerics {

struct QuadratureOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    unsigned max_depth = 18;
};

// Adaptive Gauss–Kronrod (7/15) on a finite interval. Throws NumericalFailure
// when the error estimate exceeds max(abs_tol, rel_tol·|I|).
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opts = {});

// ∫_a^∞ f via x = a + t/(1−t) on t ∈ [0,1).
double integrate_to_infinity(const std::function<double(double)>& f, double a,
                             const QuadratureOptions& opts = {});

// ∫_{-∞}^{∞} f via x = t/(1−t²) on t ∈ (−1,1).
double integrate_real_line(const std::function<double(double)>& f,
                           const QuadratureOptions& opts = {});

struct RootResult {
    double x;
    double fx;
    int iterations;
};

// Bracketed root of f on [lo, hi] (TOMS 748). Requires a sign change;
// stops when the bracket is narrower than abs_tol + rel_tol·|x|.
RootResult find_root(const std::function<double(double)>& f, double lo, double hi,
                     double abs_tol, double rel_tol = 0.0, int max_iter = 200);

struct MinimumResult {
    double x;
    double fx;
    int iterations;
};

// Golden-section search on [lo, hi] until the bracket is below abs_tol.
MinimumResult golden_section(const std::function<double(double)>& f, double lo, double hi,
                             double abs_tol, int max_iter = 400);

std::vector<double> log_grid(double lo, double hi, std::size_t n);
std::vector<double> linear_grid(double lo, double hi, std::size_t n);

// Runs body(i) for i in [0, n) on up to `threads` workers (0 = hardware
// concurrency). body must not touch shared mutable state.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

unsigned resolve_threads(unsigned requested);

} // namespace xol::numerics
