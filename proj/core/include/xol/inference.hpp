#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "xol/distortion.hpp"
#include "xol/loading.hpp"
#include "xol/retention.hpp"
#include "xol/severity.hpp"

namespace xol {

using Matrix = std::vector<std::vector<double>>;

struct EstimationResult {
    double d_hat = 0.0;
    double std_error = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double level = 0.95;
    LoadingRule rule{LoadingKind::Decreasing, 1.0};
    DistortionMeasure measure = DistortionMeasure::var(0.5);
    double effective_rho = 0.0;
    // Named in output order: c0..c2, b0..b5 or a0..a5.
    std::vector<std::pair<std::string, double>> coefficients;
    Matrix sigma_hat;
    std::size_t n = 0;
    std::vector<std::string> warnings;
};

struct EstimateOptions {
    double level = 0.95;
    // Gaussian-kernel bandwidth for f̂(d̂), in loss units.
    double bandwidth = 0.1;
    std::size_t grid_points = 1000;
};

// Delta-method ingredients at retention d: the gradient coefficients, the
// covariance of the moment vector and the resulting standard error of d̂ at
// sample size n. For samples the covariance is the plug-in (1/N) estimate;
// for Pareto models it is exact, which gives the population asymptotic SE.
struct Sandwich {
    std::vector<std::pair<std::string, double>> coefficients;
    Matrix sigma;
    double std_error = 0.0;
};

// Covariance of (I(X>d), X∧d, (X∧d)², (X−d)₊, (X−d)₊²).
Matrix moment_covariance(const SeverityModel& model, double d);

// E(X−d)₊ᵏ; closed form for Pareto (needs α > k), sample mean otherwise.
double excess_moment(const SeverityModel& model, double d, int k);

// `density` is f(d): exact for parametric models, a kernel estimate for data.
Sandwich sandwich(const SeverityModel& model, const LoadingRule& rule, const DistortionMeasure& measure,
                  std::size_t n, double d, double density);

// Population asymptotic SE of d̂ for a parametric model at its optimum.
double asymptotic_std_error(const SeverityModel& model, const LoadingRule& rule,
                            const DistortionMeasure& measure, std::size_t n);

// Plug-in estimators. `sample` must be an empirical model with N ≥ 30; N is
// also the portfolio size entering the loading.
EstimationResult estimate(const SeverityModel& sample, const LoadingRule& rule,
                          const DistortionMeasure& measure, const EstimateOptions& options = {});

EstimationResult estimate_decreasing(std::span<const double> losses, double delta,
                                     const DistortionMeasure& measure, double level = 0.95);
EstimationResult estimate_sd(std::span<const double> losses, double rho0, const DistortionMeasure& measure,
                             double level = 0.95, double bandwidth = 0.1);
EstimationResult estimate_sharpe(std::span<const double> losses, double rho0,
                                 const DistortionMeasure& measure, double level = 0.95,
                                 double bandwidth = 0.1);

enum class SweepParam { Rho, P };

struct CurvePoint {
    double param = 0.0;
    bool ok = false;
    double d_hat = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double std_error = 0.0;
    // δ or ρ₀ used for this point.
    double rule_value = 0.0;
    std::string error;
};

// Retention-vs-ρ (effective loading) or retention-vs-p curve for one rule.
// For StdDev/Sharpe the effective ρ is mapped to ρ₀ at the estimated optimum.
// Failed points are returned with ok = false and the error message.
std::vector<CurvePoint> retention_curve(const SeverityModel& sample, LoadingKind kind, SweepParam sweep,
                                        std::span<const double> grid, double fixed_rho, double fixed_p,
                                        const EstimateOptions& options = {}, unsigned threads = 0);

} // namespace xol
