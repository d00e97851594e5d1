#include <catch_amalgamated.hpp>

#include <array>
#include <cmath>

#include "oracles.hpp"
#include "xol/edgeworth.hpp"
#include "xol/error.hpp"

using Catch::Approx;
using namespace xol;

namespace {

const oracle::Lomax kLomax{9.0, 8.0};
const auto kModel = SeverityModel::pareto(9.0, 8.0);

struct Cumulants {
    double k3;
    double k4;
};

// Standardized skewness and excess kurtosis of X∧d from raw moments
// E(X∧d)ᵏ = ∫₀ᵈ k xᵏ⁻¹ F̄(x) dx.
Cumulants oracle_cumulants(const oracle::Lomax& L, double d) {
    auto raw = [&](int k) {
        return oracle::simpson([&](double x) { return k * std::pow(x, k - 1) * L.sbar(x); }, 0.0, d);
    };
    const double m1 = raw(1);
    const double m2 = raw(2);
    const double m3 = raw(3);
    const double m4 = raw(4);
    const double var = m2 - m1 * m1;
    const double c3 = m3 - 3.0 * m1 * m2 + 2.0 * m1 * m1 * m1;
    const double c4 = m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1 * m1 * m1 * m1;
    return {c3 / std::pow(var, 1.5), c4 / (var * var) - 3.0};
}

// G⁽²⁾/G⁽³⁾ with the Hermite polynomials evaluated at p.
double oracle_objective(double rho, double p, double n, int order, double d) {
    const auto c = oracle_cumulants(kLomax, d);
    const double x = p;
    const double h2 = x * x - 1.0;
    const double h3 = x * x * x - 3.0 * x;
    const double h5 = std::pow(x, 5) - 10.0 * x * x * x + 15.0 * x;
    const double p1 = c.k3 * h2 / 6.0;
    const double p2 = c.k4 * h3 / 24.0 + c.k3 * c.k3 / 72.0 * (h5 + 4.0 * x * h2 - x * h2 * h2);
    double bracket = oracle::normal_quantile(p) + p1 / std::sqrt(n);
    if (order == 3) bracket += p2 / n;
    return n * kLomax.mean() + n * rho * kLomax.nu1(d) + std::sqrt(n) * std::sqrt(kLomax.var_capped(d)) * bracket;
}

constexpr std::array<std::size_t, 3> kSizes{10, 25, 100};
constexpr std::array<double, 3> kOrder2{1.6276, 2.9634, 6.3361};
constexpr std::array<double, 3> kOrder3{1.5921, 2.9969, 6.6660};

} // namespace

TEST_CASE("hermite polynomials", "[edgeworth]") {
    CHECK(hermite2(0.0) == -1.0);
    CHECK(hermite3(1.0) == -2.0);
    CHECK(hermite5(1.0) == 6.0);
    CHECK(hermite2(2.0) == 3.0);
}

TEST_CASE("higher truncated moments agree with quadrature", "[edgeworth]") {
    for (double d : {0.2, 1.0, 3.0, 8.0}) {
        const auto h = higher_truncated_moments(kModel, d);
        const auto c = oracle_cumulants(kLomax, d);
        CHECK(h.kappa3 == Approx(c.k3).epsilon(1e-6));
        CHECK(h.kappa4 == Approx(c.k4).epsilon(1e-6));
    }
}

TEST_CASE("edgeworth objective matches the oracle", "[edgeworth]") {
    for (int order : {2, 3}) {
        for (double d : {0.5, 2.0, 6.0}) {
            CHECK(edgeworth_objective(kModel, 0.3, 0.75, 25, order, d) ==
                  Approx(oracle_objective(0.3, 0.75, 25, order, d)).epsilon(1e-8));
        }
    }
}

TEST_CASE("edgeworth optima match the reference values", "[edgeworth]") {
    for (std::size_t i = 0; i < kSizes.size(); ++i) {
        INFO("N=" << kSizes[i]);
        const auto s2 = solve_retention_edgeworth(kModel, 0.3, 0.75, kSizes[i], 2);
        const auto s3 = solve_retention_edgeworth(kModel, 0.3, 0.75, kSizes[i], 3);
        CHECK(s2.d_star == Approx(kOrder2[i]).margin(1e-2));
        CHECK(s3.d_star == Approx(kOrder3[i]).margin(1e-2));
        // Interior minimum of the oracle objective.
        for (int order : {2, 3}) {
            const double d = order == 2 ? s2.d_star : s3.d_star;
            const double g = oracle_objective(0.3, 0.75, double(kSizes[i]), order, d);
            CHECK(oracle_objective(0.3, 0.75, double(kSizes[i]), order, 0.99 * d) > g);
            CHECK(oracle_objective(0.3, 0.75, double(kSizes[i]), order, 1.01 * d) > g);
        }
    }
}

TEST_CASE("only the default convention matches the reference values", "[edgeworth]") {
    const EdgeworthConvention at_quantile{HermiteArgument::NormalQuantile, +1};
    double worst = 0.0;
    for (std::size_t i = 0; i < kSizes.size(); ++i) {
        worst = std::max(worst, std::abs(solve_retention_edgeworth(kModel, 0.3, 0.75, kSizes[i], 2, at_quantile).d_star -
                                         kOrder2[i]));
    }
    CHECK(worst > 1e-2);
}

TEST_CASE("edgeworth input validation", "[edgeworth]") {
    auto code = [](auto f) {
        try {
            f();
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::ParseError;
    };
    CHECK(code([] { solve_retention_edgeworth(kModel, 0.3, 0.75, 10, 4); }) == ErrorCode::InvalidArgument);
    CHECK(code([] { solve_retention_edgeworth(kModel, -0.3, 0.75, 10, 2); }) == ErrorCode::InvalidArgument);
    CHECK(code([] { edgeworth_objective(kModel, 0.3, 0.75, 10, 2, 0.0); }) == ErrorCode::InvalidArgument);
}
