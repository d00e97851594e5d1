#include "xol/edgeworth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "xol/error.hpp"
#include "xol/normal.hpp"
#include "xol/numerics.hpp"

namespace xol {

namespace {

void check_inputs(double rho, double p, std::size_t n, int order) {
    if (!(rho > 0.0)) fail(ErrorCode::InvalidArgument, "rho must be positive");
    if (!(p > 0.5 && p < 1.0)) fail(ErrorCode::NonpositivePhi, "Edgeworth solver needs p in (0.5, 1)");
    if (n == 0) fail(ErrorCode::InvalidArgument, "N must be positive");
    if (order != 2 && order != 3) fail(ErrorCode::InvalidArgument, "Edgeworth order must be 2 or 3");
}

} // namespace

CornishFisherTerms cornish_fisher_terms(const HigherTruncatedMoments& m, double p,
                                        const EdgeworthConvention& convention) {
    const double x = convention.argument == HermiteArgument::RiskLevel ? p : normal_quantile(p);
    const double h2 = hermite2(x);
    CornishFisherTerms t;
    t.p1 = convention.first_order_sign * m.kappa3 * h2 / 6.0;
    // H₂′(x) = 2x
    t.p2 = m.kappa4 / 24.0 * hermite3(x) +
           m.kappa3 * m.kappa3 / 72.0 * (hermite5(x) + 2.0 * (2.0 * x) * h2 - x * h2 * h2);
    return t;
}

double edgeworth_objective(const SeverityModel& model, double rho, double p, std::size_t n, int order,
                           double d, const EdgeworthConvention& convention) {
    check_inputs(rho, p, n, order);
    if (!(d > 0.0)) fail(ErrorCode::InvalidArgument, "d must be positive");
    const double mean = model.mean();
    if (!std::isfinite(mean)) fail(ErrorCode::NonfiniteMoment, "E(X) is infinite");
    const auto t = truncated_moments(model, d, MomentNeeds::FirstExcess);
    const auto hm = higher_truncated_moments(model, d);
    const auto cf = cornish_fisher_terms(hm, p, convention);
    const double nn = static_cast<double>(n);
    const double sqrt_n = std::sqrt(nn);
    double bracket = normal_quantile(p) + cf.p1 / sqrt_n;
    if (order == 3) bracket += cf.p2 / nn;
    return nn * mean + nn * rho * t.nu1 + sqrt_n * std::sqrt(std::max(0.0, t.capped_variance())) * bracket;
}

RetentionSolution solve_retention_edgeworth(const SeverityModel& model, double rho, double p,
                                            std::size_t n, int order,
                                            const EdgeworthConvention& convention,
                                            const SolveOptions& options) {
    check_inputs(rho, p, n, order);
    const auto grid = search_grid(model, options.grid_points);
    auto obj = [&](double d) {
        try {
            return edgeworth_objective(model, rho, p, n, order, d, convention);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::DegenerateVariance) return std::numeric_limits<double>::infinity();
            throw;
        }
    };
    std::vector<double> vals(grid.size());
    std::size_t best = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        vals[i] = obj(grid[i]);
        if (vals[i] < vals[best]) best = i;
    }
    if (best == 0 || best + 1 == grid.size()) {
        fail(ErrorCode::NoInteriorMinimum, "Edgeworth objective minimum on the search-grid boundary");
    }
    const double a = grid[best - 1];
    const double b = grid[best + 1];
    const auto r = numerics::golden_section(obj, a, b, 1e-10 * (1.0 + grid[best]));
    const double d_star = r.fx <= vals[best] ? r.x : grid[best];

    RetentionSolution sol;
    sol.d_star = d_star;
    sol.objective_value = obj(d_star);
    sol.rule = LoadingRule::constant(rho);
    sol.measure = DistortionMeasure::var(p);
    sol.n = n;
    sol.effective_rho = rho;
    sol.diagnostics.bracket_lo = a;
    sol.diagnostics.bracket_hi = b;
    sol.diagnostics.iterations = r.iterations;
    // Central difference of the objective as the stationarity residual.
    const double h = 1e-5 * (1.0 + d_star);
    sol.diagnostics.stationarity_residual = std::abs(obj(d_star + h) - obj(d_star - h)) / (2.0 * h);
    sol.diagnostics.smallest_stationary = d_star;
    sol.diagnostics.is_global_grid_min = true;
    return sol;
}

} // namespace xol
