#include "xol/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "xol/error.hpp"

namespace xol::numerics {

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opts) {
    if (a == b) return 0.0;
    double err = 0.0;
    double l1 = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, opts.max_depth, opts.rel_tol, &err, &l1);
    if (!std::isfinite(value)) {
        fail(ErrorCode::NumericalFailure, "quadrature produced a non-finite value");
    }
    const double allowed = std::max(opts.abs_tol, opts.rel_tol * std::max(std::abs(value), l1));
    if (err > allowed) {
        fail(ErrorCode::NumericalFailure,
             "quadrature did not converge: error estimate " + std::to_string(err));
    }
    return value;
}

double integrate_to_infinity(const std::function<double(double)>& f, double a,
                             const QuadratureOptions& opts) {
    auto g = [&](double t) {
        if (t >= 1.0) return 0.0;
        const double s = 1.0 - t;
        const double v = f(a + t / s);
        return v == 0.0 ? 0.0 : v / (s * s);
    };
    return integrate(g, 0.0, 1.0, opts);
}

double integrate_real_line(const std::function<double(double)>& f,
                           const QuadratureOptions& opts) {
    auto g = [&](double t) {
        const double s = 1.0 - t * t;
        if (s <= 0.0) return 0.0;
        const double v = f(t / s);
        return v == 0.0 ? 0.0 : v * (1.0 + t * t) / (s * s);
    };
    return integrate(g, -1.0, 1.0, opts);
}

RootResult find_root(const std::function<double(double)>& f, double lo, double hi,
                     double abs_tol, double rel_tol, int max_iter) {
    const double flo = f(lo);
    if (flo == 0.0) return {lo, 0.0, 0};
    const double fhi = f(hi);
    if (fhi == 0.0) return {hi, 0.0, 0};
    if ((flo < 0.0) == (fhi < 0.0)) {
        fail(ErrorCode::NotBracketed, "find_root: no sign change on [" + std::to_string(lo) + ", " +
                                          std::to_string(hi) + "]");
    }
    auto tol = [abs_tol, rel_tol](double a, double b) {
        return std::abs(b - a) <= abs_tol + rel_tol * std::min(std::abs(a), std::abs(b));
    };
    std::uintmax_t iters = static_cast<std::uintmax_t>(max_iter);
    const auto bracket =
        boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
    // Prefer the end with the smaller residual.
    const double fa = f(bracket.first);
    const double fb = f(bracket.second);
    if (std::abs(fa) <= std::abs(fb)) return {bracket.first, fa, static_cast<int>(iters)};
    return {bracket.second, fb, static_cast<int>(iters)};
}

MinimumResult golden_section(const std::function<double(double)>& f, double lo, double hi,
                             double abs_tol, int max_iter) {
    constexpr double kInvPhi = 0.6180339887498949;
    double a = lo;
    double b = hi;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = f(c);
    double fd = f(d);
    int it = 0;
    while (b - a > abs_tol && it < max_iter) {
        // Ties move left so the smaller argument wins.
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = f(d);
        }
        ++it;
    }
    if (fc <= fd) return {c, fc, it};
    return {d, fd, it};
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi >= lo) || n == 0) {
        fail(ErrorCode::InvalidArgument, "log_grid: need 0 < lo <= hi and n >= 1");
    }
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    const double llo = std::log(lo);
    const double step = (std::log(hi) - llo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(llo + step * static_cast<double>(i));
    out.front() = lo;
    out.back() = hi;
    return out;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
    if (!(hi >= lo) || n == 0) fail(ErrorCode::InvalidArgument, "linear_grid: need lo <= hi and n >= 1");
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = lo + step * static_cast<double>(i);
    out.back() = hi;
    return out;
}

unsigned resolve_threads(unsigned requested) {
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
    const unsigned workers = static_cast<unsigned>(
        std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(n, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto run = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    pool.clear();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace xol::numerics
