#include "xol/distortion.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "xol/error.hpp"
#include "xol/normal.hpp"
#include "xol/numerics.hpp"

namespace xol {

namespace {

const numerics::QuadratureOptions kPhiQuad{1e-12, 1e-10, 20};

void check_param(DistortionKind kind, double v) {
    if (!std::isfinite(v)) fail(ErrorCode::InvalidArgument, "distortion parameter must be finite");
    switch (kind) {
    case DistortionKind::VaR:
    case DistortionKind::ES:
        if (!(v > 0.0 && v < 1.0)) fail(ErrorCode::InvalidArgument, "risk level p must lie in (0,1)");
        break;
    case DistortionKind::DualPower:
        if (!(v >= 1.0)) fail(ErrorCode::InvalidArgument, "dual-power beta must be >= 1");
        break;
    case DistortionKind::Gini:
        if (!(v >= 0.0 && v <= 1.0)) fail(ErrorCode::InvalidArgument, "Gini beta must lie in [0,1]");
        break;
    case DistortionKind::PHT:
        if (!(v >= 0.0 && v < 1.0)) fail(ErrorCode::InvalidArgument, "PHT beta must lie in [0,1)");
        break;
    case DistortionKind::Wang:
        if (!(v >= 0.0)) fail(ErrorCode::InvalidArgument, "Wang beta must be >= 0");
        break;
    }
}

// h′(Φ(−z))·φ(z), the integrand weight after t = Φ(−z).
double weight(const DistortionMeasure& m, double z) {
    const double pdf = normal_pdf(z);
    if (pdf == 0.0) return 0.0;
    const double b = m.param();
    switch (m.kind()) {
    case DistortionKind::DualPower:
        return b * std::pow(normal_cdf(z), b - 1.0) * pdf;
    case DistortionKind::Gini:
        return (1.0 + b - 2.0 * b * normal_cdf(-z)) * pdf;
    case DistortionKind::PHT: {
        const double t = normal_cdf(-z);
        if (t <= 0.0) return 0.0;
        return (1.0 - b) * std::exp(-b * std::log(t) + std::log(pdf));
    }
    case DistortionKind::Wang:
        return normal_pdf(z - b);
    default:
        break;
    }
    fail(ErrorCode::InvalidArgument, "weight: not a smooth distortion");
}

} // namespace

DistortionMeasure::DistortionMeasure(DistortionKind kind, double param)
    : kind_(kind), param_(param), phi_(0.0) {
    check_param(kind, param);
    phi_ = phi_h_normal(*this);
}

DistortionMeasure DistortionMeasure::var(double p) { return {DistortionKind::VaR, p}; }
DistortionMeasure DistortionMeasure::es(double p) { return {DistortionKind::ES, p}; }
DistortionMeasure DistortionMeasure::dual_power(double b) { return {DistortionKind::DualPower, b}; }
DistortionMeasure DistortionMeasure::gini(double b) { return {DistortionKind::Gini, b}; }
DistortionMeasure DistortionMeasure::pht(double b) { return {DistortionKind::PHT, b}; }
DistortionMeasure DistortionMeasure::wang(double b) { return {DistortionKind::Wang, b}; }

DistortionMeasure DistortionMeasure::parse(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        fail(ErrorCode::InvalidArgument, "measure must look like name:value, got '" + std::string(text) + "'");
    }
    std::string name(text.substr(0, colon));
    for (auto& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    const std::string value(text.substr(colon + 1));
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (value.empty() || end != value.c_str() + value.size()) {
        fail(ErrorCode::InvalidArgument, "bad measure parameter '" + value + "'");
    }
    if (name == "var") return var(v);
    if (name == "es") return es(v);
    if (name == "dualpower") return dual_power(v);
    if (name == "gini") return gini(v);
    if (name == "pht") return pht(v);
    if (name == "wang") return wang(v);
    fail(ErrorCode::InvalidArgument, "unknown measure '" + name + "'");
}

double DistortionMeasure::h(double s) const {
    if (!(s >= 0.0 && s <= 1.0)) fail(ErrorCode::InvalidArgument, "h: s must lie in [0,1]");
    const double b = param_;
    switch (kind_) {
    case DistortionKind::VaR:
        return s > 1.0 - b ? 1.0 : 0.0;
    case DistortionKind::ES:
        return std::min(s / (1.0 - b), 1.0);
    case DistortionKind::DualPower:
        return 1.0 - std::pow(1.0 - s, b);
    case DistortionKind::Gini:
        return (1.0 + b) * s - b * s * s;
    case DistortionKind::PHT:
        return std::pow(s, 1.0 - b);
    case DistortionKind::Wang:
        if (s == 0.0 || s == 1.0) return s;
        return normal_cdf(normal_quantile(s) + b);
    }
    return 0.0;
}

double DistortionMeasure::h_prime(double s) const {
    if (!(s > 0.0 && s < 1.0)) fail(ErrorCode::InvalidArgument, "h_prime: s must lie in (0,1)");
    const double b = param_;
    switch (kind_) {
    case DistortionKind::VaR:
        fail(ErrorCode::InvalidArgument, "VaR distortion is a step function");
    case DistortionKind::ES:
        return s < 1.0 - b ? 1.0 / (1.0 - b) : 0.0;
    case DistortionKind::DualPower:
        return b * std::pow(1.0 - s, b - 1.0);
    case DistortionKind::Gini:
        return 1.0 + b - 2.0 * b * s;
    case DistortionKind::PHT:
        return (1.0 - b) * std::pow(s, -b);
    case DistortionKind::Wang: {
        const double q = normal_quantile(s);
        return normal_pdf(q + b) / normal_pdf(q);
    }
    }
    return 0.0;
}

std::string DistortionMeasure::to_string() const {
    static const char* names[] = {"var", "es", "dualpower", "gini", "pht", "wang"};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s:%.17g", names[static_cast<int>(kind_)], param_);
    return buf;
}

double distortion_h(const DistortionMeasure& measure, double s) { return measure.h(s); }

double phi_h_normal(const DistortionMeasure& m) {
    switch (m.kind()) {
    case DistortionKind::VaR:
        return normal_quantile(m.param());
    case DistortionKind::ES: {
        const double z = normal_quantile(m.param());
        return normal_pdf(z) / (1.0 - m.param());
    }
    default:
        break;
    }
    // ∫ z·h′(Φ(−z))·φ(z) dz, split at 0 so each half-line is smooth.
    auto f = [&](double z) { return z * weight(m, z); };
    const double pos = numerics::integrate_to_infinity(f, 0.0, kPhiQuad);
    const double neg = numerics::integrate_to_infinity([&](double u) { return f(-u); }, 0.0, kPhiQuad);
    const double value = pos + neg;
    if (!std::isfinite(value)) fail(ErrorCode::NumericalFailure, "phi_h: non-finite quadrature");
    return value;
}

double phi_h_choquet(const DistortionMeasure& m) {
    auto upper = [&](double x) { return m.h(normal_cdf(-x)); };
    auto lower = [&](double u) { return 1.0 - m.h(normal_cdf(u)); }; // x = −u
    std::vector<double> cuts;
    if (m.kind() == DistortionKind::VaR || m.kind() == DistortionKind::ES) {
        cuts.push_back(normal_quantile(m.param()));
    }
    // Pieces on [0, ∞) and (−∞, 0], broken at any kink of h∘Φ̄.
    auto half_line = [&](const std::function<double(double)>& g, double kink) {
        if (kink > 0.0) {
            return numerics::integrate(g, 0.0, kink, kPhiQuad) +
                   numerics::integrate_to_infinity(g, kink, kPhiQuad);
        }
        return numerics::integrate_to_infinity(g, 0.0, kPhiQuad);
    };
    const double kink = cuts.empty() ? 0.0 : cuts.front();
    return half_line(upper, kink) - half_line(lower, -kink);
}

} // namespace xol
