#pragma once

#include <array>

namespace xol {

double normal_pdf(double x);
double normal_cdf(double x);

// Rational-approximation coefficients for the standard normal quantile
// (central and tail branches). Exposed so the self-check can be pointed at
// a deliberately damaged table.
struct QuantileTable {
    std::array<double, 6> central_num;
    std::array<double, 5> central_den;
    std::array<double, 6> tail_num;
    std::array<double, 4> tail_den;
};

const QuantileTable& default_quantile_table();

// Φ⁻¹(p) for p in (0,1); throws DomainError otherwise. One Halley step on
// top of the rational approximation brings |Φ(Φ⁻¹(p)) − p| below 1e-15.
double normal_quantile(double p);
double normal_quantile(double p, const QuantileTable& table);

} // namespace xol
