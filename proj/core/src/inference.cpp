#include "xol/inference.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "xol/error.hpp"
#include "xol/normal.hpp"
#include "xol/numerics.hpp"

namespace xol {

namespace {

constexpr std::size_t kMinSample = 30;

double quad_form(const std::vector<double>& c, const Matrix& s) {
    double acc = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        for (std::size_t j = 0; j < c.size(); ++j) acc += c[i] * s[i][j] * c[j];
    }
    return acc;
}

Matrix sub_matrix(const Matrix& s, std::size_t from, std::size_t count) {
    Matrix out(count, std::vector<double>(count));
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j = 0; j < count; ++j) out[i][j] = s[from + i][from + j];
    }
    return out;
}

double pareto_excess_moment(const ParetoII& p, double d, int k) {
    if (!(p.alpha > k)) fail(ErrorCode::NonfiniteMoment, "Pareto excess moment needs alpha > k");
    // Excess over d is Lomax(α, λ+d), weighted by F̄(d).
    const double theta = p.lambda + d;
    double v = std::pow(1.0 + d / p.lambda, -p.alpha);
    for (int j = 1; j <= k; ++j) v *= j * theta / (p.alpha - j);
    return v;
}

const SeverityModel& require_sample(const SeverityModel& m) {
    if (!m.is_empirical()) fail(ErrorCode::InvalidArgument, "estimation needs an empirical sample");
    if (m.as_empirical().size() < kMinSample) {
        fail(ErrorCode::InvalidArgument, "estimation needs at least 30 losses");
    }
    return m;
}

} // namespace

double excess_moment(const SeverityModel& model, double d, int k) {
    if (k < 1) fail(ErrorCode::InvalidArgument, "excess_moment: k must be >= 1");
    if (model.is_pareto()) return pareto_excess_moment(model.as_pareto(), d, k);
    const auto xs = model.as_empirical().sorted();
    const auto first = std::upper_bound(xs.begin(), xs.end(), d);
    long double acc = 0.0L;
    for (auto it = first; it != xs.end(); ++it) acc += std::pow(static_cast<long double>(*it - d), k);
    return static_cast<double>(acc / static_cast<long double>(xs.size()));
}

Matrix moment_covariance(const SeverityModel& model, double d) {
    Matrix s(5, std::vector<double>(5, 0.0));
    if (model.is_empirical()) {
        const auto xs = model.as_empirical().sorted();
        const auto t = model.as_empirical().moments(d);
        const double mean[5] = {t.sbar, t.mu1, t.mu2, t.nu1, t.nu2};
        long double acc[5][5] = {};
        for (double x : xs) {
            const double c = std::min(x, d);
            const double e = std::max(x - d, 0.0);
            const double z[5] = {x > d ? 1.0 : 0.0, c, c * c, e, e * e};
            double r[5];
            for (int i = 0; i < 5; ++i) r[i] = z[i] - mean[i];
            for (int i = 0; i < 5; ++i) {
                for (int j = i; j < 5; ++j) acc[i][j] += static_cast<long double>(r[i]) * r[j];
            }
        }
        const long double n = static_cast<long double>(xs.size());
        for (int i = 0; i < 5; ++i) {
            for (int j = i; j < 5; ++j) s[i][j] = s[j][i] = static_cast<double>(acc[i][j] / n);
        }
        return s;
    }
    // Closed forms: products reduce to truncated and excess moments because
    // I(X>d)·(X∧d) = d·I(X>d), (X∧d)·(X−d)₊ = d·(X−d)₊, and so on.
    const auto t = truncated_moments(model, d, MomentNeeds::All);
    const auto h = higher_truncated_moments(model, d);
    const double nu3 = excess_moment(model, d, 3);
    const double nu4 = excess_moment(model, d, 4);
    const double m[5] = {t.sbar, t.mu1, t.mu2, t.nu1, t.nu2};
    const double e2[5][5] = {
        {t.sbar, d * t.sbar, d * d * t.sbar, t.nu1, t.nu2},
        {d * t.sbar, t.mu2, h.m3, d * t.nu1, d * t.nu2},
        {d * d * t.sbar, h.m3, h.m4, d * d * t.nu1, d * d * t.nu2},
        {t.nu1, d * t.nu1, d * d * t.nu1, t.nu2, nu3},
        {t.nu2, d * t.nu2, d * d * t.nu2, nu3, nu4},
    };
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) s[i][j] = e2[i][j] - m[i] * m[j];
    }
    return s;
}

Sandwich sandwich(const SeverityModel& model, const LoadingRule& rule, const DistortionMeasure& measure,
                  std::size_t n, double d, double density) {
    if (n == 0) fail(ErrorCode::InvalidArgument, "N must be positive");
    const double phi = measure.phi();
    if (!(phi > 0.0)) fail(ErrorCode::NonpositivePhi, "phi_h(Z) must be positive");
    const bool flat = rule.kind == LoadingKind::Constant || rule.kind == LoadingKind::Decreasing;
    const auto t = truncated_moments(model, d, flat ? MomentNeeds::FirstExcess : MomentNeeds::All);
    const double sb = t.sbar;
    const double mu1 = t.mu1;
    const double nu1 = t.nu1;
    const double nu2 = t.nu2;
    const double vmu = t.capped_variance();
    if (!(vmu > 0.0)) fail(ErrorCode::DegenerateVariance, "Var(X∧d) is zero");
    const double sqrt_n = std::sqrt(static_cast<double>(n));

    Sandwich out;
    const Matrix full = moment_covariance(model, d);
    double lead = 0.0;
    std::vector<double> g;

    if (flat) {
        const double rho = rule.kind == LoadingKind::Constant ? rule.value : rule.value / sqrt_n;
        const double k = std::pow(sqrt_n * rho / phi, 2);
        const double c0 = 2.0 * (d - mu1) * (1.0 - sb) - k * (2.0 * d * sb - 2.0 * mu1 * sb);
        const double c1 = 2.0 * (d - mu1) - k * 2.0 * mu1;
        const double c2 = k;
        out.coefficients = {{"c0", c0}, {"c1", c1}, {"c2", c2}};
        out.sigma = sub_matrix(full, 1, 2);
        lead = c0;
        g = {c1, c2};
    } else {
        const double vnu = t.excess_variance();
        if (!(vnu > 0.0)) fail(ErrorCode::DegenerateVariance, "Var((X−d)+) is zero");
        const double r0 = rule.value;
        const double sm = std::sqrt(vmu);
        const double sv = std::sqrt(vnu);
        const double gap = d - mu1;
        // Shared with the Sharpe set: derivatives in μ₁ and μ₂.
        const double c2 = phi * (-sb / sm + mu1 * sb * gap / (vmu * sm));
        const double c3 = -phi * sb * gap / (2.0 * vmu * sm);
        double c1 = 0.0;
        double c4 = 0.0;
        double c5 = 0.0;
        std::string prefix;
        if (rule.kind == LoadingKind::StdDev) {
            prefix = "b";
            c1 = phi * gap / sm - r0 * (nu2 - 2.0 * nu1 * nu1) / sv;
            c4 = -2.0 * r0 * nu1 *
                 ((1.0 - 2.0 * sb) / sv + (nu2 * sb + nu1 * nu1 * (1.0 - 2.0 * sb)) / (2.0 * vnu * sv));
            c5 = r0 * (nu1 * nu1 - sb * nu2) / (2.0 * vnu * sv);
        } else {
            prefix = "a";
            const double v32 = vnu * sv;
            const double v52 = vnu * vnu * sv;
            c1 = phi * gap / sm - r0 * nu2 / v32;
            c4 = r0 * nu1 * (2.0 / v32 + 3.0 * (nu1 * nu1 - nu2 * sb) / v52);
            c5 = -r0 * (sb / v32 + 3.0 * (nu1 * nu1 - nu2 * sb) / (2.0 * v52));
        }
        // Total d-derivative: F̄′ = −f, μ₁′ = F̄, μ₂′ = 2dF̄, ν₁′ = −F̄, ν₂′ = −2ν₁.
        const double c0 = phi * sb / sm - c1 * density + c2 * sb + c3 * 2.0 * d * sb - c4 * sb -
                          c5 * 2.0 * nu1;
        out.coefficients = {{prefix + "0", c0}, {prefix + "1", c1}, {prefix + "2", c2},
                            {prefix + "3", c3}, {prefix + "4", c4}, {prefix + "5", c5}};
        out.sigma = full;
        lead = c0;
        g = {c1, c2, c3, c4, c5};
    }
    const double q = quad_form(g, out.sigma);
    if (!(lead != 0.0) || !std::isfinite(lead)) {
        fail(ErrorCode::DegenerateVariance, "leading sandwich coefficient is zero");
    }
    out.std_error = std::sqrt(std::max(0.0, q)) / std::abs(lead) / sqrt_n;
    return out;
}

double asymptotic_std_error(const SeverityModel& model, const LoadingRule& rule,
                            const DistortionMeasure& measure, std::size_t n) {
    if (!model.is_pareto()) fail(ErrorCode::InvalidArgument, "asymptotic SE needs a parametric model");
    const auto sol = solve_retention(model, rule, measure, n);
    return sandwich(model, rule, measure, n, sol.d_star, model.density(sol.d_star)).std_error;
}

EstimationResult estimate(const SeverityModel& sample, const LoadingRule& rule,
                          const DistortionMeasure& measure, const EstimateOptions& options) {
    require_sample(sample);
    if (!(options.level > 0.0 && options.level < 1.0)) {
        fail(ErrorCode::InvalidArgument, "confidence level must lie in (0,1)");
    }
    if (!(options.bandwidth > 0.0)) fail(ErrorCode::InvalidArgument, "bandwidth must be positive");
    if (rule.kind == LoadingKind::Constant) {
        fail(ErrorCode::InvalidArgument, "nonparametric estimation needs a decreasing, sd or sharpe rule");
    }
    const std::size_t n = sample.as_empirical().size();

    RetentionSolution sol;
    try {
        sol = solve_retention(sample, rule, measure, n, SolveOptions{options.grid_points});
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ConditionViolated) fail(ErrorCode::AtomConditionViolated, e.what());
        throw;
    }

    EstimationResult r;
    r.d_hat = sol.d_star;
    r.level = options.level;
    r.rule = rule;
    r.measure = measure;
    r.n = n;
    r.effective_rho = sol.effective_rho;
    r.warnings = sol.diagnostics.warnings;

    const double f_hat = kde_density(sample.as_empirical().sorted(), r.d_hat, options.bandwidth);
    auto sw = sandwich(sample, rule, measure, n, r.d_hat, f_hat);
    if (!(sw.std_error > 0.0) || !std::isfinite(sw.std_error)) {
        fail(ErrorCode::DegenerateVariance, "standard error is not positive and finite");
    }
    r.std_error = sw.std_error;
    r.coefficients = std::move(sw.coefficients);
    r.sigma_hat = std::move(sw.sigma);
    const double z = normal_quantile(0.5 * (1.0 + options.level));
    r.ci_lo = r.d_hat - z * r.std_error;
    r.ci_hi = r.d_hat + z * r.std_error;
    return r;
}

EstimationResult estimate_decreasing(std::span<const double> losses, double delta,
                                     const DistortionMeasure& measure, double level) {
    const auto model = SeverityModel::empirical(std::vector<double>(losses.begin(), losses.end()));
    EstimateOptions o;
    o.level = level;
    return estimate(model, LoadingRule::decreasing(delta), measure, o);
}

EstimationResult estimate_sd(std::span<const double> losses, double rho0, const DistortionMeasure& measure,
                             double level, double bandwidth) {
    const auto model = SeverityModel::empirical(std::vector<double>(losses.begin(), losses.end()));
    return estimate(model, LoadingRule::std_dev(rho0), measure, EstimateOptions{level, bandwidth, 1000});
}

EstimationResult estimate_sharpe(std::span<const double> losses, double rho0,
                                 const DistortionMeasure& measure, double level, double bandwidth) {
    const auto model = SeverityModel::empirical(std::vector<double>(losses.begin(), losses.end()));
    return estimate(model, LoadingRule::sharpe(rho0), measure, EstimateOptions{level, bandwidth, 1000});
}

std::vector<CurvePoint> retention_curve(const SeverityModel& sample, LoadingKind kind, SweepParam sweep,
                                        std::span<const double> grid, double fixed_rho, double fixed_p,
                                        const EstimateOptions& options, unsigned threads) {
    require_sample(sample);
    if (grid.empty()) fail(ErrorCode::InvalidArgument, "sweep grid is empty");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) fail(ErrorCode::InvalidArgument, "sweep grid must be strictly increasing");
    }
    if (kind == LoadingKind::Constant) fail(ErrorCode::InvalidArgument, "curves need decreasing, sd or sharpe");
    const std::size_t n = sample.as_empirical().size();
    const double sqrt_n = std::sqrt(static_cast<double>(n));

    std::vector<CurvePoint> out(grid.size());
    numerics::parallel_for(grid.size(), threads, [&](std::size_t i) {
        CurvePoint& pt = out[i];
        pt.param = grid[i];
        try {
            const double rho = sweep == SweepParam::Rho ? grid[i] : fixed_rho;
            const double p = sweep == SweepParam::P ? grid[i] : fixed_p;
            if (!(rho > 0.0)) fail(ErrorCode::InvalidArgument, "effective rho must be positive");
            const auto measure = DistortionMeasure::var(p);
            LoadingRule rule{kind, 1.0};
            if (kind == LoadingKind::Decreasing) {
                rule = LoadingRule::decreasing(rho * sqrt_n);
            } else {
                const SolveOptions so{options.grid_points};
                auto solve_d = [&](const LoadingRule& r) { return solve_retention(sample, r, measure, n, so).d_star; };
                auto eff = [&](const LoadingRule& r, double d) { return effective_rho(sample, r, n, d); };
                // Start from the ρ₀ matching the effective loading at the
                // decreasing-rule optimum; a tiny ρ₀ pins d* to the grid edge.
                const double d0 = solve_d(LoadingRule::decreasing(rho * sqrt_n));
                const double initial = rho / eff(make_rule(kind, 1.0), d0);
                const auto m = map_effective_rho(rho, kind, solve_d, eff, initial);
                rule = make_rule(kind, m.rho0);
            }
            const auto r = estimate(sample, rule, measure, options);
            pt.ok = true;
            pt.d_hat = r.d_hat;
            pt.ci_lo = r.ci_lo;
            pt.ci_hi = r.ci_hi;
            pt.std_error = r.std_error;
            pt.rule_value = rule.value;
        } catch (const Error& e) {
            pt.ok = false;
            pt.error = std::string(to_string(e.code())) + ": " + e.what();
        }
    });
    return out;
}

} // namespace xol
