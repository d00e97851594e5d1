#include "xol/normal.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "xol/error.hpp"

namespace xol {

namespace {

constexpr double kLowTail = 0.02425;

const QuantileTable kAcklam{
    {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
     1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00},
    {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
     6.680131188771972e+01, -1.328068155288572e+01},
    {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
     -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00},
    {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
     3.754408661907416e+00},
};

double tail_branch(double q, const QuantileTable& t) {
    const auto& c = t.tail_num;
    const auto& d = t.tail_den;
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

} // namespace

double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x * (0.5 * std::numbers::sqrt2));
}

const QuantileTable& default_quantile_table() { return kAcklam; }

double normal_quantile(double p) { return normal_quantile(p, kAcklam); }

double normal_quantile(double p, const QuantileTable& table) {
    if (!(p > 0.0 && p < 1.0)) {
        fail(ErrorCode::DomainError, "normal_quantile: p must lie in (0,1), got " + std::to_string(p));
    }
    double x;
    if (p < kLowTail) {
        x = tail_branch(std::sqrt(-2.0 * std::log(p)), table);
    } else if (p > 1.0 - kLowTail) {
        x = -tail_branch(std::sqrt(-2.0 * std::log1p(-p)), table);
    } else {
        const auto& a = table.central_num;
        const auto& b = table.central_den;
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    // Halley refinement; work in the smaller tail to avoid cancellation.
    const double e = (p < 0.5) ? normal_cdf(x) - p : (1.0 - p) - normal_cdf(-x);
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    if (std::isfinite(u)) x = x - u / (1.0 + 0.5 * x * u);
    return x;
}

} // namespace xol
