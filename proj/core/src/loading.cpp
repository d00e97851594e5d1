#include "xol/loading.hpp"

#include <cmath>

#include "xol/error.hpp"

namespace xol {

LoadingRule LoadingRule::constant(double rho) { return make_rule(LoadingKind::Constant, rho); }
LoadingRule LoadingRule::decreasing(double delta) { return make_rule(LoadingKind::Decreasing, delta); }
LoadingRule LoadingRule::std_dev(double rho0) { return make_rule(LoadingKind::StdDev, rho0); }
LoadingRule LoadingRule::sharpe(double rho0) { return make_rule(LoadingKind::Sharpe, rho0); }

LoadingRule make_rule(LoadingKind kind, double value) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        fail(ErrorCode::InvalidArgument, "loading parameter must be positive and finite");
    }
    return LoadingRule{kind, value};
}

std::string LoadingRule::name() const {
    switch (kind) {
    case LoadingKind::Constant: return "constant";
    case LoadingKind::Decreasing: return "decreasing";
    case LoadingKind::StdDev: return "sd";
    case LoadingKind::Sharpe: return "sharpe";
    }
    return "";
}

std::string LoadingRule::param_name() const {
    switch (kind) {
    case LoadingKind::Constant: return "rho";
    case LoadingKind::Decreasing: return "delta";
    default: return "rho0";
    }
}

LoadingKind parse_loading_kind(const std::string& text) {
    if (text == "constant") return LoadingKind::Constant;
    if (text == "decreasing") return LoadingKind::Decreasing;
    if (text == "sd" || text == "stddev" || text == "std") return LoadingKind::StdDev;
    if (text == "sharpe") return LoadingKind::Sharpe;
    fail(ErrorCode::InvalidArgument, "unknown loading rule '" + text + "'");
}

double effective_rho(const SeverityModel& model, const LoadingRule& rule, std::size_t n, double d) {
    if (n == 0) fail(ErrorCode::InvalidArgument, "N must be positive");
    const double sqrt_n = std::sqrt(static_cast<double>(n));
    switch (rule.kind) {
    case LoadingKind::Constant:
        return rule.value;
    case LoadingKind::Decreasing:
        return rule.value / sqrt_n;
    case LoadingKind::StdDev:
    case LoadingKind::Sharpe: {
        const auto t = truncated_moments(model, d, MomentNeeds::All);
        const double v = t.excess_variance();
        if (!(v > 0.0)) fail(ErrorCode::DegenerateVariance, "Var((X−d)+) is zero");
        return rule.kind == LoadingKind::StdDev ? rule.value * std::sqrt(v) / sqrt_n
                                                : rule.value / (sqrt_n * std::sqrt(v));
    }
    }
    return 0.0;
}

} // namespace xol
