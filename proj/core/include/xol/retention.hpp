#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "xol/distortion.hpp"
#include "xol/loading.hpp"
#include "xol/severity.hpp"

namespace xol {

enum class Tri { False, True, Unknown };

std::string to_string(Tri t);

// Named existence conditions for the approximately optimal retention.
using ConditionReport = std::map<std::string, Tri>;

struct SolveDiagnostics {
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    int iterations = 0;
    double stationarity_residual = 0.0;
    bool is_global_grid_min = true;
    // Smallest local minimum of the objective found on the search grid; NaN
    // when none was located.
    double smallest_stationary = 0.0;
    ConditionReport condition_checks;
    std::vector<std::string> warnings;
};

struct RetentionSolution {
    double d_star = 0.0;
    double objective_value = 0.0;
    LoadingRule rule{LoadingKind::Constant, 1.0};
    DistortionMeasure measure = DistortionMeasure::var(0.5);
    std::size_t n = 0;
    double effective_rho = 0.0;
    SolveDiagnostics diagnostics;
};

// Normal-approximated risk of total cost,
//   G(d) = N·E(X) + N·ρ(d)·ν₁(d) + √N·φ_h(Z)·√(μ₂−μ₁²)
// with ρ(d) the rule's effective loading.
double objective(const SeverityModel& model, const LoadingRule& rule, const DistortionMeasure& measure,
                 std::size_t n, double d);

// Constant/Decreasing: H(d) = (d−μ₁)² − (√N·ρ/φ)²(μ₂−μ₁²).
// StdDev/Sharpe: G′(d)/√N.
double stationarity_function(const SeverityModel& model, const LoadingRule& rule,
                             const DistortionMeasure& measure, std::size_t n, double d);

// The same two functions evaluated from precomputed moments; `mean` is E(X).
double objective_from_moments(const TruncatedMoments& t, double mean, const LoadingRule& rule,
                              double phi, std::size_t n);
double stationarity_from_moments(const TruncatedMoments& t, const LoadingRule& rule, double phi,
                                 std::size_t n);

struct SolveOptions {
    std::size_t grid_points = 1000;
};

// Log-spaced search grid: [q(1e-4), q(1−1e-6)] for parametric models,
// [smallest positive loss, 0.999 quantile] for samples.
std::vector<double> search_grid(const SeverityModel& model, std::size_t points);

RetentionSolution solve_retention(const SeverityModel& model, const LoadingRule& rule,
                                  const DistortionMeasure& measure, std::size_t n,
                                  const SolveOptions& options = {});

// Aggregate (stop-loss) retention F⁻(ρ/(1+ρ)); throws ConditionNotMet when
// 1−p ≥ 1/(1+ρ).
double stop_loss_retention(const SeverityModel& model, double rho, double p);

ConditionReport condition_report(const SeverityModel& model, const LoadingRule& rule,
                                 const DistortionMeasure& measure, std::size_t n);

} // namespace xol
