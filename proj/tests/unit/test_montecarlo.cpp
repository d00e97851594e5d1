#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "xol/error.hpp"
#include "xol/montecarlo.hpp"
#include "xol/retention.hpp"
#include "xol/rng.hpp"

using Catch::Approx;
using namespace xol;

namespace {

const auto kModel = SeverityModel::pareto(9.0, 8.0);
const oracle::Lomax kLomax{9.0, 8.0};

// Rows regenerated from the documented substream layout.
std::vector<std::vector<double>> regenerate(std::size_t n, std::size_t b, std::uint64_t seed, std::uint64_t stream) {
    std::vector<std::vector<double>> rows(b, std::vector<double>(n));
    for (std::size_t j = 0; j < b; ++j) {
        Rng rng = Rng::substream(seed, {stream, j});
        for (auto& v : rows[j]) v = draw(kModel, rng);
    }
    return rows;
}

double type1_quantile(std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    const auto k = static_cast<std::size_t>(std::ceil(p * double(v.size()) - 1e-9));
    return v[std::max<std::size_t>(k, 1) - 1];
}

McConfig config(std::size_t b, unsigned threads = 1) {
    McConfig c;
    c.B = b;
    c.threads = threads;
    return c;
}

} // namespace

TEST_CASE("config validation", "[montecarlo]") {
    auto code = [](const McConfig& c) {
        try {
            validate(c);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::ParseError;
    };
    McConfig c;
    CHECK(code(c) == ErrorCode::ParseError);
    c.B = 999;
    CHECK(code(c) == ErrorCode::InvalidArgument);
    c = McConfig{};
    c.M = 99;
    CHECK(code(c) == ErrorCode::InvalidArgument);
    c = McConfig{};
    c.d_grid = {1.0, 1.0};
    CHECK(code(c) == ErrorCode::InvalidArgument);
    c.d_grid = {-1.0, 1.0};
    CHECK(code(c) == ErrorCode::InvalidArgument);
    const auto g = default_d_grid(kModel);
    CHECK(g.size() == 300);
    CHECK(g.front() == Approx(kLomax.quantile(0.01)).epsilon(1e-12));
    CHECK(g.back() == Approx(kLomax.quantile(0.999)).epsilon(1e-12));
}

TEST_CASE("empirical quantile is the type-1 order statistic", "[montecarlo]") {
    CHECK(empirical_quantile({4, 1, 3, 2}, 0.5) == 2.0);
    CHECK(empirical_quantile({4, 1, 3, 2}, 0.51) == 3.0);
    CHECK(empirical_quantile({4, 1, 3, 2}, 0.99) == 4.0);
    CHECK(empirical_quantile({4, 1, 3, 2}, 0.01) == 1.0);
}

TEST_CASE("capped sums agree with regenerated draws", "[montecarlo]") {
    const PortfolioDraws draws(kModel, 7, 1500, 99, 3, 2);
    const auto rows = regenerate(7, 1500, 99, 3);
    std::vector<double> s;
    for (double d : {0.1, 0.7, 3.0}) {
        draws.capped_sums(d, s);
        double pooled_excess = 0.0;
        for (std::size_t j = 0; j < rows.size(); ++j) {
            double t = 0.0;
            for (double x : rows[j]) {
                t += std::min(x, d);
                pooled_excess += std::max(x - d, 0.0);
            }
            CHECK(s[j] == Approx(t).epsilon(1e-12));
        }
        CHECK(draws.pooled_moments(d).nu1 == Approx(pooled_excess / (7.0 * 1500.0)).epsilon(1e-10));
    }
}

TEST_CASE("total cost adds the premium to the empirical quantile", "[montecarlo]") {
    const PortfolioDraws draws(kModel, 10, 2000, 5);
    const auto rows = regenerate(10, 2000, 5, 0);
    const double d = 0.8;
    const auto rule = LoadingRule::decreasing(0.5);
    std::vector<double> sums;
    double excess = 0.0;
    for (const auto& r : rows) {
        double t = 0.0;
        for (double x : r) {
            t += std::min(x, d);
            excess += std::max(x - d, 0.0);
        }
        sums.push_back(t);
    }
    const double nu1 = excess / (10.0 * 2000.0);
    const double expected = type1_quantile(sums, 0.75) + (1.0 + 0.5 / std::sqrt(10.0)) * 10.0 * nu1;
    CHECK(mc_var_total_cost(draws, rule, 0.75, d) == Approx(expected).epsilon(1e-12));
}

TEST_CASE("very large retention gives the VaR of the uncapped sum", "[montecarlo]") {
    const PortfolioDraws draws(kModel, 10, 2000, 6);
    const auto rows = regenerate(10, 2000, 6, 0);
    std::vector<double> totals;
    for (const auto& r : rows) {
        double t = 0.0;
        for (double x : r) t += x;
        totals.push_back(t);
    }
    CHECK(mc_var_total_cost(draws, LoadingRule::constant(0.3), 0.75, 1e12) ==
          Approx(type1_quantile(totals, 0.75)).epsilon(1e-12));
}

TEST_CASE("results do not depend on the thread count", "[montecarlo]") {
    const PortfolioDraws one(kModel, 25, 3000, 77, 0, 1);
    const PortfolioDraws four(kModel, 25, 3000, 77, 0, 4);
    std::vector<double> a;
    std::vector<double> b;
    for (double d : {0.2, 1.0, 5.0}) {
        one.capped_sums(d, a);
        four.capped_sums(d, b);
        CHECK(a == b);
    }
    auto c1 = config(3000, 1);
    auto c4 = config(3000, 4);
    const auto r1 = brute_force_optimal(kModel, LoadingRule::decreasing(0.5), 25, 0.75, c1);
    const auto r4 = brute_force_optimal(kModel, LoadingRule::decreasing(0.5), 25, 0.75, c4);
    CHECK(r1.d_actual == r4.d_actual);
    CHECK(r1.values == r4.values);

    Table2Spec spec;
    spec.sizes = {500};
    spec.rules = {LoadingKind::Decreasing};
    c1.M = c4.M = 100;
    const auto t1 = replicate_table2(spec, c1);
    const auto t4 = replicate_table2(spec, c4);
    CHECK(t1[0].mean_d_hat == t4[0].mean_d_hat);
    CHECK(t1[0].empirical_se == t4[0].empirical_se);
    CHECK(t1[0].coverage == t4[0].coverage);
}

TEST_CASE("common random numbers give monotone sums and quantiles", "[montecarlo]") {
    const PortfolioDraws draws(kModel, 25, 2000, 8);
    const auto grid = default_d_grid(kModel);
    std::vector<double> prev;
    std::vector<double> cur;
    double prev_q = -1.0;
    for (double d : grid) {
        draws.capped_sums(d, cur);
        if (!prev.empty()) {
            for (std::size_t j = 0; j < cur.size(); ++j) REQUIRE(cur[j] >= prev[j]);
        }
        const double q = empirical_quantile(cur, 0.75);
        CHECK(q >= prev_q);
        prev_q = q;
        prev = cur;
    }
}

TEST_CASE("doubling B moves the cost by less than three MC standard errors", "[montecarlo]") {
    const double d = 0.5472;
    const double rho = 0.5 / std::sqrt(100.0);
    const auto rule = LoadingRule::decreasing(0.5);
    const double small = mc_var_total_cost(kModel, rule, 100, 0.75, d, config(20000));
    const double large = mc_var_total_cost(kModel, rule, 100, 0.75, d, config(40000));
    // Quantile SE √(p(1−p)/B)/f(q), with f from a quantile difference.
    const PortfolioDraws draws(kModel, 100, 20000, 20240917);
    std::vector<double> s;
    draws.capped_sums(d, s);
    const double h = 0.02;
    const double inv_density = (type1_quantile(s, 0.75 + h) - type1_quantile(s, 0.75 - h)) / (2.0 * h);
    const double se_quantile = std::sqrt(0.75 * 0.25 / 20000.0) * inv_density;
    // The pooled premium term (1+ρ)Nν̂₁ carries its own MC error.
    const double sd_excess = std::sqrt(kLomax.var_excess(d));
    const double se_premium = (1.0 + rho) * 100.0 * sd_excess / std::sqrt(100.0 * 20000.0);
    const double se = std::hypot(se_quantile, se_premium);
    INFO("quantile SE " << se_quantile << ", premium SE " << se_premium);
    CHECK(std::abs(large - small) < 3.0 * se);
}

TEST_CASE("normal approximation error stays bounded as N grows", "[montecarlo]") {
    const auto rule = LoadingRule::decreasing(0.5);
    const auto measure = DistortionMeasure::var(0.75);
    auto max_gap = [&](std::size_t n) {
        const PortfolioDraws draws(kModel, n, 20000, 20240917);
        double worst = 0.0;
        for (double d : default_d_grid(kModel)) {
            const double g = objective(kModel, rule, measure, n, d);
            worst = std::max(worst, std::abs(g - mc_var_total_cost(draws, rule, 0.75, d)));
        }
        return worst;
    };
    const double g10 = max_gap(10);
    const double g100 = max_gap(100);
    INFO("max gap N=10: " << g10 << ", N=100: " << g100);
    CHECK(g100 <= 1.25 * g10);
}

TEST_CASE("brute-force optima", "[montecarlo]") {
    const auto cfg = config(20000);
    const auto r = brute_force_optimal(kModel, LoadingRule::decreasing(0.5), 100, 0.75, cfg);
    CHECK(r.d_actual == Approx(0.5472).epsilon(0.15));
    CHECK(r.values.size() == r.grid.size());
    CHECK(r.var_at_optimum <= *std::min_element(r.values.begin(), r.values.end()));
    const auto c = brute_force_optimal(kModel, LoadingRule::constant(0.3), 100, 0.75, cfg);
    CHECK(c.d_actual == Approx(7.1241).epsilon(0.15));

    McConfig narrow = cfg;
    narrow.d_grid = {0.01, 0.02, 0.03};
    CHECK_THROWS_AS(brute_force_optimal(kModel, LoadingRule::decreasing(0.5), 100, 0.75, narrow), Error);
}

TEST_CASE("insolvency study", "[montecarlo]") {
    const auto cfg = config(20000);
    const auto one = insolvency_probability(kModel, 1, 0.2, 0.75, cfg);
    CHECK(one.prob == 0.0);
    CHECK_FALSE(one.analytic_at_level);
    CHECK(one.threshold == Approx(0.25));
    CHECK(one.survival_at_d == Approx(kLomax.sbar(one.d_star)).epsilon(1e-12));
    const auto ten = insolvency_probability(kModel, 10, 0.2, 0.75, cfg);
    CHECK(ten.prob == Approx(0.25).margin(0.02));
    CHECK(ten.d_star == Approx(0.8779).epsilon(0.10));
    CHECK(ten.analytic_at_level);
}

TEST_CASE("turning points", "[montecarlo]") {
    const auto cfg = config(20000);
    // P(X ≥ d)² = 0.25 gives F̄(d) = 1/2.
    const double exact = kLomax.quantile(0.5);
    CHECK(exact == Approx(8.0 * (std::pow(2.0, 1.0 / 9.0) - 1.0)).epsilon(1e-12));
    const auto tp2 = turning_points(kModel, 2, 0.75, cfg);
    REQUIRE(tp2.size() == 1);
    // Delta method: SE(d̃) = √(q(1−q)/B) / |d/dd F̄(d)²|.
    const double slope = 2.0 * kLomax.sbar(exact) * kLomax.pdf(exact);
    const double se = std::sqrt(0.25 * 0.75 / 20000.0) / slope;
    CHECK(std::abs(tp2[0] - exact) < 2.0 * se);

    const auto tp5 = turning_points(kModel, 5, 0.75, cfg);
    REQUIRE(tp5.size() == 4);
    for (std::size_t i = 1; i < tp5.size(); ++i) CHECK(tp5[i] > tp5[i - 1]);

    CHECK_THROWS_AS(turning_points(kModel, 1, 0.75, cfg), Error);
}

TEST_CASE("replicate_table1 rows", "[montecarlo]") {
    Table1Spec spec;
    spec.sizes = {100};
    spec.rules = {LoadingKind::Constant, LoadingKind::Decreasing};
    const auto rows = replicate_table1(spec, config(20000));
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].approx_order == "o(sqrt N)");
    CHECK(rows[1].approx_order == "o(1)");
    CHECK(rows[2].approx_order == "o(1/sqrt N)");
    // Constant rows share one brute-force optimum.
    CHECK(rows[0].d_actual == rows[1].d_actual);
    for (const auto& r : rows) {
        CHECK(r.rel_diff_pct == Approx(100.0 * (r.d_approx - r.d_actual) / r.d_actual).epsilon(1e-12));
    }
    CHECK(rows[3].rule == "decreasing");
    CHECK(rows[3].d_approx == Approx(0.5472).margin(1e-3));
}

TEST_CASE("replicate_table2 rows", "[montecarlo]") {
    Table2Spec spec;
    spec.sizes = {500};
    auto cfg = config(1000);
    cfg.M = 100;
    const auto rows = replicate_table2(spec, cfg);
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
        INFO(r.rule);
        CHECK(r.replications + r.failures == 100);
        CHECK(r.bias_pct == Approx(100.0 * (r.mean_d_hat - r.d_true) / r.d_true).epsilon(1e-12));
        CHECK(r.se_diff_pct == Approx(100.0 * (r.empirical_se - r.theoretical_se) / r.theoretical_se).epsilon(1e-12));
        CHECK(r.coverage >= 0.0);
        CHECK(r.coverage <= 1.0);
    }
    CHECK(rows[0].d_true == Approx(0.5472).margin(1e-3));
}
