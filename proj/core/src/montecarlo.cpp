#include "xol/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "xol/edgeworth.hpp"
#include "xol/error.hpp"
#include "xol/numerics.hpp"
#include "xol/retention.hpp"
#include "xol/rng.hpp"

namespace xol {

namespace {

std::vector<double> draw_rows(const SeverityModel& model, std::size_t n, std::size_t b, std::uint64_t seed,
                              std::uint64_t stream, unsigned threads) {
    if (n == 0) fail(ErrorCode::InvalidArgument, "portfolio size N must be positive");
    if (b == 0) fail(ErrorCode::InvalidArgument, "B must be positive");
    std::vector<double> x(n * b);
    numerics::parallel_for(b, threads, [&](std::size_t j) {
        Rng rng = Rng::substream(seed, {stream, j});
        const auto row = x.begin() + static_cast<std::ptrdiff_t>(j * n);
        for (std::size_t i = 0; i < n; ++i) row[static_cast<std::ptrdiff_t>(i)] = draw(model, rng);
        std::sort(row, row + static_cast<std::ptrdiff_t>(n));
    });
    return x;
}

const std::vector<double>& grid_or_default(const SeverityModel& model, const McConfig& cfg,
                                           std::vector<double>& storage) {
    if (!cfg.d_grid.empty()) return cfg.d_grid;
    storage = default_d_grid(model);
    return storage;
}

double quantile_index_value(std::vector<double>& values, double p) {
    const std::size_t b = values.size();
    auto k = static_cast<std::size_t>(std::ceil(p * static_cast<double>(b) - 1e-9));
    k = std::clamp<std::size_t>(k, 1, b);
    auto it = values.begin() + static_cast<std::ptrdiff_t>(k - 1);
    std::nth_element(values.begin(), it, values.end());
    return *it;
}

std::string order_label(int order) {
    switch (order) {
    case 1: return "o(sqrt N)";
    case 2: return "o(1)";
    default: return "o(1/sqrt N)";
    }
}

} // namespace

void validate(const McConfig& cfg) {
    if (cfg.B < 1000) fail(ErrorCode::InvalidArgument, "B must be at least 1000");
    if (cfg.M < 100) fail(ErrorCode::InvalidArgument, "M must be at least 100");
    for (std::size_t i = 0; i < cfg.d_grid.size(); ++i) {
        if (!(cfg.d_grid[i] > 0.0) || !std::isfinite(cfg.d_grid[i]))
            fail(ErrorCode::InvalidArgument, "d_grid values must be positive and finite");
        if (i > 0 && !(cfg.d_grid[i] > cfg.d_grid[i - 1]))
            fail(ErrorCode::InvalidArgument, "d_grid must be strictly increasing");
    }
}

std::vector<double> default_d_grid(const SeverityModel& model) {
    double lo = model.quantile(0.01);
    const double hi = model.quantile(0.999);
    if (!(lo > 0.0)) lo = hi * 1e-4;
    return numerics::log_grid(lo, hi, 300);
}

PortfolioDraws::PortfolioDraws(const SeverityModel& model, std::size_t n, std::size_t b, std::uint64_t seed,
                               std::uint64_t stream, unsigned threads)
    : n_(n), b_(b), x_(draw_rows(model, n, b, seed, stream, threads)), pooled_(x_) {
    pre_.resize(b_ * (n_ + 1));
    for (std::size_t j = 0; j < b_; ++j) {
        double* p = &pre_[j * (n_ + 1)];
        const double* row = &x_[j * n_];
        p[0] = 0.0;
        for (std::size_t i = 0; i < n_; ++i) p[i + 1] = p[i] + row[i];
    }
}

void PortfolioDraws::capped_sums(double d, std::vector<double>& out) const {
    out.resize(b_);
    for (std::size_t j = 0; j < b_; ++j) {
        const double* row = &x_[j * n_];
        const auto k = static_cast<std::size_t>(std::upper_bound(row, row + n_, d) - row);
        out[j] = static_cast<double>(n_ - k) * d + pre_[j * (n_ + 1) + k];
    }
}

TruncatedMoments PortfolioDraws::pooled_moments(double d) const { return pooled_.moments(d); }

double empirical_quantile(std::vector<double> values, double p) {
    if (values.empty()) fail(ErrorCode::InvalidArgument, "empirical_quantile: no values");
    if (!(p > 0.0 && p < 1.0)) fail(ErrorCode::InvalidArgument, "empirical_quantile: p must lie in (0,1)");
    return quantile_index_value(values, p);
}

double mc_effective_rho(const PortfolioDraws& draws, const LoadingRule& rule, double d) {
    const double sqrt_n = std::sqrt(static_cast<double>(draws.portfolio_size()));
    switch (rule.kind) {
    case LoadingKind::Constant: return rule.value;
    case LoadingKind::Decreasing: return rule.value / sqrt_n;
    default: break;
    }
    const auto t = draws.pooled_moments(d);
    const double v = t.excess_variance();
    if (!(v > 0.0)) fail(ErrorCode::DegenerateVariance, "simulated excess loss has zero variance at d");
    return rule.kind == LoadingKind::StdDev ? rule.value * std::sqrt(v) / sqrt_n
                                            : rule.value / (sqrt_n * std::sqrt(v));
}

double mc_var_total_cost(const PortfolioDraws& draws, const LoadingRule& rule, double p, double d) {
    if (!(d > 0.0)) fail(ErrorCode::InvalidArgument, "retention d must be positive");
    if (!(p > 0.0 && p < 1.0)) fail(ErrorCode::InvalidArgument, "p must lie in (0,1)");
    std::vector<double> s;
    draws.capped_sums(d, s);
    const double var = quantile_index_value(s, p);
    const double nu1 = draws.pooled_moments(d).nu1;
    const double rho = mc_effective_rho(draws, rule, d);
    return var + (1.0 + rho) * static_cast<double>(draws.portfolio_size()) * nu1;
}

double mc_var_total_cost(const SeverityModel& model, const LoadingRule& rule, std::size_t n, double p, double d,
                         const McConfig& cfg) {
    const PortfolioDraws draws(model, n, cfg.B, cfg.seed, 0, cfg.threads);
    return mc_var_total_cost(draws, rule, p, d);
}

BruteForceResult brute_force_optimal(const PortfolioDraws& draws, const LoadingRule& rule, double p,
                                     const std::vector<double>& grid) {
    if (grid.size() < 3) fail(ErrorCode::InvalidArgument, "d_grid needs at least 3 points");
    BruteForceResult r;
    r.grid = grid;
    r.values.assign(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) r.values[i] = mc_var_total_cost(draws, rule, p, grid[i]);
    // First occurrence wins ties, so the smallest minimizing d is reported.
    const auto best = static_cast<std::size_t>(std::min_element(r.values.begin(), r.values.end()) -
                                               r.values.begin());
    if (best == 0 || best + 1 == grid.size()) {
        fail(ErrorCode::GridBoundaryMinimum,
             "simulated minimum at the d_grid edge (d = " + std::to_string(grid[best]) + ")");
    }
    r.d_actual = grid[best];
    r.var_at_optimum = r.values[best];
    const double lo = grid[best - 1];
    const double hi = grid[best + 1];
    const auto refined = numerics::golden_section(
        [&](double d) { return mc_var_total_cost(draws, rule, p, d); }, lo, hi, 1e-7 * hi);
    if (refined.fx < r.var_at_optimum) {
        r.d_actual = refined.x;
        r.var_at_optimum = refined.fx;
    }
    return r;
}

BruteForceResult brute_force_optimal(const SeverityModel& model, const LoadingRule& rule, std::size_t n, double p,
                                     const McConfig& cfg) {
    std::vector<double> storage;
    const auto& grid = grid_or_default(model, cfg, storage);
    const PortfolioDraws draws(model, n, cfg.B, cfg.seed, 0, cfg.threads);
    return brute_force_optimal(draws, rule, p, grid);
}

InsolvencyResult insolvency_probability(const SeverityModel& model, std::size_t n, double rho, double p,
                                        const McConfig& cfg) {
    if (!(rho > 0.0)) fail(ErrorCode::InvalidArgument, "rho must be positive");
    if (!(p > 0.0 && p < 1.0)) fail(ErrorCode::InvalidArgument, "p must lie in (0,1)");
    std::vector<double> storage;
    const auto& grid = grid_or_default(model, cfg, storage);
    const PortfolioDraws fit(model, n, cfg.B, cfg.seed, 0, cfg.threads);
    const auto bf = brute_force_optimal(fit, LoadingRule::constant(rho), p, grid);

    InsolvencyResult r;
    r.n = n;
    r.d_star = bf.d_actual;
    r.survival_at_d = model.survival(r.d_star);
    r.threshold = std::pow(1.0 - p, 1.0 / static_cast<double>(n));
    r.analytic_at_level = r.survival_at_d <= r.threshold;

    // The premium is deterministic, so T > VaR(T) reduces to S > VaR(S).
    std::vector<double> s;
    fit.capped_sums(r.d_star, s);
    const double var = quantile_index_value(s, p);
    const PortfolioDraws fresh(model, n, cfg.B, cfg.seed, 1, cfg.threads);
    fresh.capped_sums(r.d_star, s);
    const auto above = std::count_if(s.begin(), s.end(), [&](double v) { return v > var; });
    r.prob = static_cast<double>(above) / static_cast<double>(s.size());
    return r;
}

double mc_kink_probability(const PortfolioDraws& draws, double d, std::size_t k) {
    std::vector<double> s;
    draws.capped_sums(d, s);
    const double level = static_cast<double>(k) * d;
    const auto hits = std::count_if(s.begin(), s.end(), [&](double v) { return v >= level; });
    return static_cast<double>(hits) / static_cast<double>(s.size());
}

std::vector<double> turning_points(const SeverityModel& model, std::size_t n, double p, const McConfig& cfg) {
    if (n < 2) fail(ErrorCode::InvalidArgument, "turning points need N >= 2");
    if (!(p > 0.0 && p < 1.0)) fail(ErrorCode::InvalidArgument, "p must lie in (0,1)");
    std::vector<double> storage;
    const auto& grid = grid_or_default(model, cfg, storage);
    const PortfolioDraws draws(model, n, cfg.B, cfg.seed, 0, cfg.threads);
    const double target = 1.0 - p;

    std::vector<double> out(n - 1);
    numerics::parallel_for(n - 1, cfg.threads, [&](std::size_t idx) {
        const std::size_t k = n - idx; // N − i + 1 with i = idx + 1
        // Σ(Xᵢ∧d)/d is pointwise nonincreasing in d, so the probability is too.
        auto prob = [&](double d) { return mc_kink_probability(draws, d, k); };
        double lo = grid.front();
        double hi = grid.back();
        if (!(prob(lo) >= target) || !(prob(hi) < target)) {
            fail(ErrorCode::NotBracketed, "kink probability for i = " + std::to_string(idx + 1) +
                                              " does not cross 1-p on the d_grid");
        }
        for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (prob(mid) >= target ? lo : hi) = mid;
        }
        out[idx] = 0.5 * (lo + hi);
    });
    return out;
}

std::vector<McTableRow> replicate_table1(const Table1Spec& spec, const McConfig& cfg) {
    validate(cfg);
    const auto model = SeverityModel::pareto(spec.alpha, spec.lambda);
    const auto measure = DistortionMeasure::var(spec.p);
    std::vector<double> storage;
    const auto& grid = grid_or_default(model, cfg, storage);

    std::vector<McTableRow> rows;
    for (const auto kind : spec.rules) {
        double value = spec.rho0;
        if (kind == LoadingKind::Constant) value = spec.rho;
        if (kind == LoadingKind::Decreasing) value = spec.delta;
        const auto rule = make_rule(kind, value);
        for (const auto n : spec.sizes) {
            // Same portfolios for every rule at a given N.
            const PortfolioDraws draws(model, n, cfg.B, cfg.seed, n, cfg.threads);
            const double actual = brute_force_optimal(draws, rule, spec.p, grid).d_actual;
            const int orders = kind == LoadingKind::Constant ? 3 : 1;
            for (int order = 1; order <= orders; ++order) {
                const double approx =
                    order == 1 ? solve_retention(model, rule, measure, n).d_star
                               : solve_retention_edgeworth(model, value, spec.p, n, order).d_star;
                McTableRow row;
                row.rule = rule.name();
                row.rule_value = value;
                row.n = n;
                row.approx_order = order_label(order);
                row.d_actual = actual;
                row.d_approx = approx;
                row.rel_diff_pct = 100.0 * (approx - actual) / actual;
                rows.push_back(row);
            }
        }
    }
    return rows;
}

std::vector<Table2Row> replicate_table2(const Table2Spec& spec, const McConfig& cfg) {
    validate(cfg);
    const auto model = SeverityModel::pareto(spec.alpha, spec.lambda);
    const auto measure = DistortionMeasure::var(spec.p);
    EstimateOptions options;
    options.level = spec.level;
    options.bandwidth = spec.bandwidth;

    std::vector<LoadingRule> rules;
    for (const auto kind : spec.rules) {
        rules.push_back(make_rule(kind, kind == LoadingKind::Decreasing ? spec.delta : spec.rho0));
    }

    struct Outcome {
        bool ok = false;
        double d_hat = 0.0;
        double se = 0.0;
        double lo = 0.0;
        double hi = 0.0;
    };

    std::vector<Table2Row> rows;
    for (const auto n : spec.sizes) {
        std::vector<double> truth;
        for (const auto& rule : rules) truth.push_back(solve_retention(model, rule, measure, n).d_star);

        std::vector<std::vector<Outcome>> outcomes(rules.size(), std::vector<Outcome>(cfg.M));
        numerics::parallel_for(cfg.M, cfg.threads, [&](std::size_t m) {
            // One sample per (N, m), shared by every rule.
            const std::uint64_t seed = Rng::substream(cfg.seed, {n, m}).next();
            const auto data = SeverityModel::empirical(sample(model, n, seed));
            for (std::size_t r = 0; r < rules.size(); ++r) {
                try {
                    const auto e = estimate(data, rules[r], measure, options);
                    outcomes[r][m] = {true, e.d_hat, e.std_error, e.ci_lo, e.ci_hi};
                } catch (const Error&) {
                    outcomes[r][m] = {};
                }
            }
        });

        for (std::size_t r = 0; r < rules.size(); ++r) {
            Table2Row row;
            row.rule = rules[r].name();
            row.n = n;
            row.d_true = truth[r];
            double sum = 0.0;
            double sum_se = 0.0;
            std::size_t covered = 0;
            std::size_t ok = 0;
            for (const auto& o : outcomes[r]) {
                if (!o.ok) continue;
                ++ok;
                sum += o.d_hat;
                sum_se += o.se;
                if (o.lo <= row.d_true && row.d_true <= o.hi) ++covered;
            }
            row.replications = ok;
            row.failures = cfg.M - ok;
            if (ok >= 2) {
                row.mean_d_hat = sum / static_cast<double>(ok);
                double ss = 0.0;
                for (const auto& o : outcomes[r]) {
                    if (o.ok) ss += (o.d_hat - row.mean_d_hat) * (o.d_hat - row.mean_d_hat);
                }
                row.empirical_se = std::sqrt(ss / static_cast<double>(ok - 1));
                row.theoretical_se = sum_se / static_cast<double>(ok);
                row.bias_pct = 100.0 * (row.mean_d_hat - row.d_true) / row.d_true;
                row.se_diff_pct = 100.0 * (row.empirical_se - row.theoretical_se) / row.theoretical_se;
                row.coverage = static_cast<double>(covered) / static_cast<double>(ok);
            } else {
                const double nan = std::numeric_limits<double>::quiet_NaN();
                row.mean_d_hat = row.bias_pct = row.theoretical_se = row.empirical_se = row.se_diff_pct = nan;
                row.coverage = nan;
            }
            rows.push_back(row);
        }
    }
    return rows;
}

} // namespace xol
