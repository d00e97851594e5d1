#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "xol/distortion.hpp"
#include "xol/inference.hpp"
#include "xol/loading.hpp"
#include "xol/severity.hpp"

namespace xol {

struct McConfig {
    std::size_t B = 20000; // portfolios per VaR estimate
    std::size_t M = 500;   // replications for estimator studies
    std::uint64_t seed = 20240917;
    std::vector<double> d_grid; // empty: default_d_grid(model)
    unsigned threads = 0;
};

void validate(const McConfig& cfg);

// 300 log-spaced retentions over [q(0.01), q(0.999)].
std::vector<double> default_d_grid(const SeverityModel& model);

// B simulated portfolios of N claims, shared across every retention that is
// evaluated (common random numbers). Portfolio j is drawn from substream
// (seed, stream, j), so the draws do not depend on the thread count.
class PortfolioDraws {
public:
    PortfolioDraws(const SeverityModel& model, std::size_t n, std::size_t b, std::uint64_t seed,
                   std::uint64_t stream = 0, unsigned threads = 0);

    std::size_t rows() const { return b_; }
    std::size_t portfolio_size() const { return n_; }

    // Σᵢ(Xⱼᵢ∧d) for each portfolio j, evaluated as c·d + Σ_{X≤d} X so that
    // the all-capped atom at N·d is exact.
    void capped_sums(double d, std::vector<double>& out) const;

    // Pooled moments of the B·N draws at retention d.
    TruncatedMoments pooled_moments(double d) const;

private:
    std::size_t n_;
    std::size_t b_;
    std::vector<double> x_;   // row-major, each row sorted ascending
    std::vector<double> pre_; // per-row prefix sums, (n+1) per row
    EmpiricalSample pooled_;
};

// Order statistic ⌈pB⌉ of the values (1-based).
double empirical_quantile(std::vector<double> values, double p);

// Effective ρ of a rule with the excess moments taken from the pooled draws.
double mc_effective_rho(const PortfolioDraws& draws, const LoadingRule& rule, double d);

// VaR̂_p(Σ(Xᵢ∧d)) + (1+ρ)·N·ν̂₁(d).
double mc_var_total_cost(const PortfolioDraws& draws, const LoadingRule& rule, double p, double d);
double mc_var_total_cost(const SeverityModel& model, const LoadingRule& rule, std::size_t n, double p,
                         double d, const McConfig& cfg);

struct BruteForceResult {
    double d_actual = 0.0;
    double var_at_optimum = 0.0;
    std::vector<double> grid;
    std::vector<double> values;
};

// Grid argmin of the MC total-cost VaR followed by a golden-section pass on
// the neighbouring cells. Throws GridBoundaryMinimum at a grid edge.
BruteForceResult brute_force_optimal(const PortfolioDraws& draws, const LoadingRule& rule, double p,
                                     const std::vector<double>& grid);
BruteForceResult brute_force_optimal(const SeverityModel& model, const LoadingRule& rule, std::size_t n,
                                     double p, const McConfig& cfg);

struct InsolvencyResult {
    std::size_t n = 0;
    double d_star = 0.0;
    double prob = 0.0;          // P(T(d*) > VaR̂_p(T(d*))) on independent draws
    double survival_at_d = 0.0; // P(X ≥ d*)
    double threshold = 0.0;     // (1−p)^{1/N}
    bool analytic_at_level = false; // P(X ≥ d*) ≤ (1−p)^{1/N}
};

InsolvencyResult insolvency_probability(const SeverityModel& model, std::size_t n, double rho, double p,
                                        const McConfig& cfg);

// P(Σ(Xᵢ∧d) ≥ k·d) over the simulated portfolios.
double mc_kink_probability(const PortfolioDraws& draws, double d, std::size_t k);

// d̃_N(i) solving P(Σ(Xᵢ∧d) ≥ (N−i+1)d) = 1−p for i = 1..N−1, by bisection
// on the CRN-estimated probability. Throws NotBracketed if no crossing.
std::vector<double> turning_points(const SeverityModel& model, std::size_t n, double p, const McConfig& cfg);

struct McTableRow {
    std::string rule;
    double rule_value = 0.0;
    std::size_t n = 0;
    std::string approx_order; // "o(sqrt N)", "o(1)", "o(1/sqrt N)"
    double d_actual = 0.0;
    double d_approx = 0.0;
    double rel_diff_pct = 0.0; // 100·(approx − actual)/actual
};

struct Table1Spec {
    double alpha = 9.0;
    double lambda = 8.0;
    double p = 0.75;
    double rho = 0.3;   // constant
    double delta = 0.5; // decreasing
    double rho0 = 0.5;  // sd and sharpe
    std::vector<std::size_t> sizes{10, 25, 100};
    std::vector<LoadingKind> rules{LoadingKind::Constant, LoadingKind::Decreasing, LoadingKind::StdDev,
                                   LoadingKind::Sharpe};
};

std::vector<McTableRow> replicate_table1(const Table1Spec& spec, const McConfig& cfg);

struct Table2Row {
    std::string rule;
    std::size_t n = 0;
    double d_true = 0.0;
    double mean_d_hat = 0.0;
    double bias_pct = 0.0;
    double theoretical_se = 0.0; // mean of per-replication SEs
    double empirical_se = 0.0;   // SD of d̂ across replications
    double se_diff_pct = 0.0;    // 100·(empirical − theoretical)/theoretical
    double coverage = 0.0;       // share of CIs containing d_true
    std::size_t replications = 0;
    std::size_t failures = 0;
};

struct Table2Spec {
    double alpha = 9.0;
    double lambda = 8.0;
    double p = 0.75;
    double delta = 0.5;
    double rho0 = 0.5;
    double level = 0.95;
    double bandwidth = 0.1;
    std::vector<std::size_t> sizes{500, 2000, 10000};
    std::vector<LoadingKind> rules{LoadingKind::Decreasing, LoadingKind::StdDev, LoadingKind::Sharpe};
};

std::vector<Table2Row> replicate_table2(const Table2Spec& spec, const McConfig& cfg);

} // namespace xol
