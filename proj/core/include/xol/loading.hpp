#pragma once

#include <cstddef>
#include <string>

#include "xol/severity.hpp"

namespace xol {

enum class LoadingKind { Constant, Decreasing, StdDev, Sharpe };

// Premium loading applied to the expected ceded loss N·ν₁(d).
//   Constant:   ρ
//   Decreasing: ρ_N = δ/√N
//   StdDev:     ρ = ρ₀·√(ν₂−ν₁²)/√N
//   Sharpe:     ρ = ρ₀/(√N·√(ν₂−ν₁²))
struct LoadingRule {
    LoadingKind kind;
    double value;

    static LoadingRule constant(double rho);
    static LoadingRule decreasing(double delta);
    static LoadingRule std_dev(double rho0);
    static LoadingRule sharpe(double rho0);

    // "constant", "decreasing", "sd", "sharpe".
    std::string name() const;
    // "rho", "delta", "rho0", "rho0".
    std::string param_name() const;
};

// Parses the rule names accepted by name() plus common aliases.
LoadingKind parse_loading_kind(const std::string& text);
LoadingRule make_rule(LoadingKind kind, double value);

// Effective ρ at portfolio size N and retention d.
double effective_rho(const SeverityModel& model, const LoadingRule& rule, std::size_t n, double d);

// ρ₀ that gives effective loading `target` for a StdDev/Sharpe rule, where
// solve_d returns the optimal retention for a candidate rule and the map
// ρ₀ ↦ effective ρ(d*(ρ₀)) is solved by damped fixed-point iteration
// started from `initial_rho0`.
struct Rho0Mapping {
    double rho0;
    double d_star;
    int iterations;
    bool converged;
};

template <class SolveD, class EffectiveAt>
Rho0Mapping map_effective_rho(double target, LoadingKind kind, SolveD solve_d, EffectiveAt effective_at,
                              double initial_rho0) {
    // effective ρ is linear in ρ₀ at fixed d, so ρ₀ ← target/(ρ/ρ₀) is exact
    // once d* stops moving; damping guards against oscillation in d*.
    double rho0 = initial_rho0;
    double d = 0.0;
    for (int it = 1; it <= 100; ++it) {
        d = solve_d(make_rule(kind, rho0));
        const double unit = effective_at(make_rule(kind, 1.0), d);
        const double next = target / unit;
        const double updated = 0.5 * rho0 + 0.5 * next;
        if (std::abs(updated - rho0) <= 1e-8 * std::max(1.0, std::abs(rho0))) {
            return {updated, solve_d(make_rule(kind, updated)), it, true};
        }
        rho0 = updated;
    }
    return {rho0, d, 100, false};
}

} // namespace xol
