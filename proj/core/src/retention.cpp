#include "xol/retention.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "xol/error.hpp"
#include "xol/numerics.hpp"

namespace xol {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRootRelTol = 1e-13;
constexpr double kBracketCap = 1e12;

bool is_flat_rule(const LoadingRule& rule) {
    return rule.kind == LoadingKind::Constant || rule.kind == LoadingKind::Decreasing;
}

MomentNeeds needs_for(const LoadingRule& rule) {
    return is_flat_rule(rule) ? MomentNeeds::FirstExcess : MomentNeeds::All;
}

// ρ for rules whose loading does not depend on d.
double flat_rho(const LoadingRule& rule, std::size_t n) {
    return rule.kind == LoadingKind::Constant ? rule.value
                                              : rule.value / std::sqrt(static_cast<double>(n));
}

void require_phi(double phi) {
    if (!(phi > 0.0)) {
        fail(ErrorCode::NonpositivePhi, "distortion coefficient phi_h(Z) = " + std::to_string(phi) +
                                            " is not positive");
    }
}

double model_mean(const SeverityModel& model) {
    const double m = model.mean();
    if (!std::isfinite(m)) fail(ErrorCode::NonfiniteMoment, "E(X) is infinite");
    return m;
}

// Objective that maps degenerate points to +∞ so grid scans skip them.
double safe_objective(const SeverityModel& model, const LoadingRule& rule, double phi, double mean,
                      std::size_t n, double d) {
    try {
        const double v = objective_from_moments(truncated_moments(model, d, needs_for(rule)), mean,
                                                rule, phi, n);
        return std::isfinite(v) ? v : kInf;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::DegenerateVariance) return kInf;
        throw;
    }
}

double safe_stationarity(const SeverityModel& model, const LoadingRule& rule, double phi,
                         std::size_t n, double d) {
    try {
        return stationarity_from_moments(truncated_moments(model, d, needs_for(rule)), rule, phi, n);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::DegenerateVariance) return kNaN;
        throw;
    }
}

RetentionSolution solve_flat(const SeverityModel& model, const LoadingRule& rule,
                             const DistortionMeasure& measure, std::size_t n) {
    const double phi = measure.phi();
    const double rho = flat_rho(rule, n);
    const double nrho2 = static_cast<double>(n) * rho * rho;
    const double level = nrho2 / (nrho2 + phi * phi);

    RetentionSolution sol;
    sol.rule = rule;
    sol.measure = measure;
    sol.n = n;
    sol.effective_rho = rho;
    sol.diagnostics.condition_checks = condition_report(model, rule, measure, n);

    const double f0 = model.cdf(0.0);
    if (!(f0 < level)) {
        fail(ErrorCode::ConditionViolated, "atom at zero too large: F(0) = " + std::to_string(f0) +
                                               " >= N·rho²/(N·rho²+phi²) = " + std::to_string(level));
    }

    auto h = [&](double d) {
        return stationarity_from_moments(truncated_moments(model, d, MomentNeeds::FirstExcess), rule,
                                         phi, n);
    };

    const double d2 = model.upper_quantile(level);
    double lo = d2;
    double h_lo = h(lo);
    if (h_lo >= 0.0) {
        // Sample plateaus can leave the right end past the minimum of H.
        const double left = model.quantile(level);
        if (left > 0.0 && h(left) < 0.0) {
            lo = left;
            h_lo = h(lo);
        }
    }
    if (h_lo == 0.0) {
        sol.d_star = lo;
    } else if (h_lo > 0.0) {
        fail(ErrorCode::NoRootFound, "H is positive at the lower bracket d2 = " + std::to_string(d2));
    } else {
        double hi = std::max(2.0 * lo, 1.0);
        while (h(hi) <= 0.0) {
            hi *= 2.0;
            if (hi > kBracketCap) {
                fail(ErrorCode::NoRootFound, "H stays negative up to 1e12: retention is unbounded");
            }
        }
        const auto r = numerics::find_root(h, lo, hi, 1e-14, kRootRelTol);
        sol.d_star = r.x;
        sol.diagnostics.iterations = r.iterations;
        sol.diagnostics.bracket_hi = hi;
    }
    sol.diagnostics.bracket_lo = lo;
    sol.diagnostics.bracket_hi = std::max(sol.diagnostics.bracket_hi, sol.d_star);
    sol.diagnostics.stationarity_residual = std::abs(h(sol.d_star));
    sol.diagnostics.smallest_stationary = sol.d_star;
    sol.diagnostics.is_global_grid_min = true;
    sol.objective_value = objective(model, rule, measure, n, sol.d_star);
    return sol;
}

// Root of g in [a, b] with g(a) < 0 < g(b), the minimum of G in the cell.
double cell_root(const std::function<double(double)>& g, double a, double b, int& iterations) {
    const auto r = numerics::find_root(g, a, b, 1e-14, kRootRelTol);
    iterations += r.iterations;
    return r.x;
}

RetentionSolution solve_curved(const SeverityModel& model, const LoadingRule& rule,
                               const DistortionMeasure& measure, std::size_t n,
                               const SolveOptions& options) {
    const double phi = measure.phi();
    const double mean = model_mean(model);

    RetentionSolution sol;
    sol.rule = rule;
    sol.measure = measure;
    sol.n = n;
    sol.diagnostics.condition_checks = condition_report(model, rule, measure, n);
    for (const auto& [name, value] : sol.diagnostics.condition_checks) {
        if (value == Tri::False) sol.diagnostics.warnings.push_back("condition not satisfied: " + name);
    }

    const auto grid = search_grid(model, options.grid_points);
    // Surface infinite moments before scanning.
    truncated_moments(model, grid.front(), MomentNeeds::All);

    std::vector<double> vals(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) vals[i] = safe_objective(model, rule, phi, mean, n, grid[i]);

    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (vals[i] < vals[best]) best = i;
    }
    if (!std::isfinite(vals[best])) {
        fail(ErrorCode::DegenerateVariance, "objective is degenerate on the whole search grid");
    }
    if (best == 0 || best + 1 == grid.size()) {
        fail(ErrorCode::NoInteriorMinimum, "objective minimum sits on the search-grid boundary at d = " +
                                               std::to_string(grid[best]));
    }

    auto g = [&](double d) { return safe_stationarity(model, rule, phi, n, d); };
    auto obj = [&](double d) { return safe_objective(model, rule, phi, mean, n, d); };

    const double a = grid[best - 1];
    const double m = grid[best];
    const double b = grid[best + 1];
    const double ga = g(a);
    const double gm = g(m);
    const double gb = g(b);
    int iterations = 0;
    double d_star = m;
    if (gm == 0.0) {
        d_star = m;
    } else if (ga < 0.0 && gm > 0.0) {
        d_star = cell_root(g, a, m, iterations);
    } else if (gm < 0.0 && gb > 0.0) {
        d_star = cell_root(g, m, b, iterations);
    } else {
        const auto r = numerics::golden_section(obj, a, b, 1e-10 * (1.0 + m));
        d_star = r.x;
        iterations = r.iterations;
    }
    if (obj(d_star) > vals[best]) d_star = m;

    sol.d_star = d_star;
    sol.objective_value = obj(d_star);
    sol.effective_rho = effective_rho(model, rule, n, d_star);
    sol.diagnostics.bracket_lo = a;
    sol.diagnostics.bracket_hi = b;
    sol.diagnostics.iterations = iterations;
    sol.diagnostics.stationarity_residual = std::abs(g(d_star));

    // Smallest local minimum: first −/+ sign change of G′ along the grid.
    sol.diagnostics.smallest_stationary = kNaN;
    double g_prev = g(grid.front());
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double g_cur = g(grid[i]);
        if (g_prev < 0.0 && g_cur >= 0.0) {
            int unused = 0;
            sol.diagnostics.smallest_stationary =
                g_cur == 0.0 ? grid[i] : cell_root(g, grid[i - 1], grid[i], unused);
            break;
        }
        g_prev = g_cur;
    }
    const double s = sol.diagnostics.smallest_stationary;
    if (std::isnan(s)) {
        sol.diagnostics.is_global_grid_min = false;
        sol.diagnostics.warnings.push_back("no stationary point located on the search grid");
    } else if (std::abs(s - d_star) > 1e-6 * (1.0 + d_star)) {
        sol.diagnostics.is_global_grid_min = false;
        sol.diagnostics.warnings.push_back("smallest stationary point " + std::to_string(s) +
                                           " differs from the global grid minimum");
    }
    return sol;
}

} // namespace

std::string to_string(Tri t) {
    switch (t) {
    case Tri::True: return "true";
    case Tri::False: return "false";
    case Tri::Unknown: return "unknown";
    }
    return "unknown";
}

double objective_from_moments(const TruncatedMoments& t, double mean, const LoadingRule& rule,
                              double phi, std::size_t n) {
    const double nn = static_cast<double>(n);
    const double sqrt_n = std::sqrt(nn);
    const double sd_mu = std::sqrt(std::max(0.0, t.capped_variance()));
    switch (rule.kind) {
    case LoadingKind::Constant:
    case LoadingKind::Decreasing:
        return nn * mean + nn * flat_rho(rule, n) * t.nu1 + sqrt_n * phi * sd_mu;
    case LoadingKind::StdDev: {
        const double sd_nu = std::sqrt(std::max(0.0, t.excess_variance()));
        return nn * mean + sqrt_n * (phi * sd_mu + rule.value * t.nu1 * sd_nu);
    }
    case LoadingKind::Sharpe: {
        const double v = t.excess_variance();
        if (!(v > 0.0)) fail(ErrorCode::DegenerateVariance, "Var((X−d)+) is zero");
        return nn * mean + sqrt_n * (phi * sd_mu + rule.value * t.nu1 / std::sqrt(v));
    }
    }
    return kNaN;
}

double stationarity_from_moments(const TruncatedMoments& t, const LoadingRule& rule, double phi,
                                 std::size_t n) {
    const double d = t.d;
    const double vmu = t.capped_variance();
    if (is_flat_rule(rule)) {
        const double c = std::sqrt(static_cast<double>(n)) * flat_rho(rule, n) / phi;
        return (d - t.mu1) * (d - t.mu1) - c * c * vmu;
    }
    if (!(vmu > 0.0)) fail(ErrorCode::DegenerateVariance, "Var(X∧d) is zero");
    const double vnu = t.excess_variance();
    if (!(vnu > 0.0)) fail(ErrorCode::DegenerateVariance, "Var((X−d)+) is zero");
    const double sbar = t.sbar;
    const double f = 1.0 - sbar;
    const double r0 = rule.value;
    const double lead = phi * sbar * (d - t.mu1) / std::sqrt(vmu);
    const double nu1sq = t.nu1 * t.nu1;
    if (rule.kind == LoadingKind::StdDev) {
        return lead - r0 * sbar * std::sqrt(vnu) - r0 * f * nu1sq / std::sqrt(vnu);
    }
    return lead - r0 * sbar / std::sqrt(vnu) + r0 * f * nu1sq / (vnu * std::sqrt(vnu));
}

double objective(const SeverityModel& model, const LoadingRule& rule, const DistortionMeasure& measure,
                 std::size_t n, double d) {
    if (!(d > 0.0)) fail(ErrorCode::InvalidArgument, "objective: d must be positive");
    if (n == 0) fail(ErrorCode::InvalidArgument, "objective: N must be positive");
    require_phi(measure.phi());
    return objective_from_moments(truncated_moments(model, d, needs_for(rule)), model_mean(model), rule,
                                  measure.phi(), n);
}

double stationarity_function(const SeverityModel& model, const LoadingRule& rule,
                             const DistortionMeasure& measure, std::size_t n, double d) {
    if (!(d > 0.0)) fail(ErrorCode::InvalidArgument, "stationarity: d must be positive");
    if (n == 0) fail(ErrorCode::InvalidArgument, "stationarity: N must be positive");
    require_phi(measure.phi());
    return stationarity_from_moments(truncated_moments(model, d, needs_for(rule)), rule,
                                     measure.phi(), n);
}

std::vector<double> search_grid(const SeverityModel& model, std::size_t points) {
    if (points < 3) fail(ErrorCode::InvalidArgument, "search grid needs at least 3 points");
    if (model.is_pareto()) {
        return numerics::log_grid(model.quantile(1e-4), model.quantile(1.0 - 1e-6), points);
    }
    const auto xs = model.as_empirical().sorted();
    const auto pos = std::upper_bound(xs.begin(), xs.end(), 0.0);
    if (pos == xs.end()) fail(ErrorCode::DegenerateVariance, "sample has no positive losses");
    const double lo = *pos;
    const double hi = std::max(lo, model.quantile(0.999));
    return numerics::log_grid(lo, hi, points);
}

RetentionSolution solve_retention(const SeverityModel& model, const LoadingRule& rule,
                                  const DistortionMeasure& measure, std::size_t n,
                                  const SolveOptions& options) {
    if (n == 0) fail(ErrorCode::InvalidArgument, "N must be positive");
    require_phi(measure.phi());
    if (model.is_empirical() && model.as_empirical().min() == model.as_empirical().max()) {
        // X ≡ k: G falls linearly on (0, k] and is flat beyond.
        fail(ErrorCode::NoInteriorMinimum, "all losses are equal: the objective has no interior minimum");
    }
    if (is_flat_rule(rule)) {
        model_mean(model);
        return solve_flat(model, rule, measure, n);
    }
    return solve_curved(model, rule, measure, n, options);
}

double stop_loss_retention(const SeverityModel& model, double rho, double p) {
    if (!(rho > 0.0)) fail(ErrorCode::InvalidArgument, "rho must be positive");
    if (!(p > 0.0 && p < 1.0)) fail(ErrorCode::InvalidArgument, "p must lie in (0,1)");
    if (!(1.0 - p < 1.0 / (1.0 + rho))) {
        fail(ErrorCode::ConditionNotMet, "stop-loss retention requires 1-p < 1/(1+rho)");
    }
    return model.quantile(rho / (1.0 + rho));
}

ConditionReport condition_report(const SeverityModel& model, const LoadingRule& rule,
                                 const DistortionMeasure& measure, std::size_t n) {
    ConditionReport r;
    const double phi = measure.phi();
    r["phi_positive"] = phi > 0.0 ? Tri::True : Tri::False;
    const double f0 = model.cdf(0.0);
    const double alpha = model.tail_index();

    if (is_flat_rule(rule)) {
        r["finite_mean"] = std::isfinite(model.mean()) ? Tri::True : Tri::False;
        const double rho = flat_rho(rule, n);
        const double nrho2 = static_cast<double>(n) * rho * rho;
        r["atom_at_zero"] = f0 < nrho2 / (nrho2 + phi * phi) ? Tri::True : Tri::False;
        return r;
    }

    if (rule.kind == LoadingKind::StdDev) {
        r["tail_index_gt_2"] = model.is_empirical() ? Tri::Unknown : (alpha > 2.0 ? Tri::True : Tri::False);
    } else {
        r["tail_index_in_2_4"] =
            model.is_empirical() ? Tri::Unknown : (alpha > 2.0 && alpha < 4.0 ? Tri::True : Tri::False);
    }

    if (f0 <= 0.0) {
        r["atom_at_zero"] = Tri::True;
        return r;
    }
    TruncatedMoments t0;
    try {
        t0 = truncated_moments(model, 0.0, MomentNeeds::All);
    } catch (const Error&) {
        r["atom_at_zero"] = Tri::Unknown;
        return r;
    }
    // At d = 0, ν₁ = E(X) and ν₂ = E(X²).
    const double ex = t0.nu1;
    const double var = t0.nu2 - ex * ex;
    if (!(var > 0.0)) {
        r["atom_at_zero"] = Tri::False;
        return r;
    }
    const double sb0 = 1.0 - f0;
    const double lhs = phi * std::sqrt(sb0 * f0);
    const double r0 = rule.value;
    const double rhs = rule.kind == LoadingKind::StdDev
                           ? r0 * sb0 * std::sqrt(var) + r0 * f0 * ex * ex / std::sqrt(var)
                           : r0 * sb0 / std::sqrt(var) - r0 * f0 * ex * ex / (var * std::sqrt(var));
    r["atom_at_zero"] = lhs < rhs ? Tri::True : Tri::False;
    return r;
}

} // namespace xol
