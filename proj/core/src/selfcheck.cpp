#include "xol/selfcheck.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>

#include "xol/distortion.hpp"
#include "xol/error.hpp"
#include "xol/montecarlo.hpp"
#include "xol/numerics.hpp"
#include "xol/retention.hpp"
#include "xol/severity.hpp"

namespace xol {

namespace {

std::string fmt(const char* format, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, format, a, b);
    return buf;
}

bool close(double a, double b, double rel, double abs = 0.0) {
    return std::abs(a - b) <= abs + rel * std::max(std::abs(a), std::abs(b));
}

// Returns an empty string on success, otherwise a description of the failure.
using Check = std::function<std::string()>;

std::string check_normal_quantile(const QuantileTable& table) {
    struct Ref {
        double p;
        double z;
    };
    static constexpr Ref refs[] = {
        {0.5, 0.0},
        {0.75, 0.6744897501960817},
        {0.9, 1.2815515655446004},
        {0.95, 1.6448536269514722},
        {0.975, 1.959963984540054},
        {0.99, 2.3263478740408408},
        {0.001, -3.090232306167813},
    };
    for (const auto& r : refs) {
        const double z = normal_quantile(r.p, table);
        if (!close(z, r.z, 1e-12, 1e-14)) return fmt("quantile(%g) = %.17g", r.p, z);
    }
    for (double p = 1e-6; p < 1.0; p += 0.0123) {
        const double z = normal_quantile(p, table);
        if (!close(normal_cdf(z), p, 1e-12)) return fmt("cdf(quantile(%g)) = %.17g", p, normal_cdf(z));
    }
    return {};
}

std::string check_moment_quadrature() {
    const auto model = SeverityModel::pareto(9.0, 8.0);
    const auto sbar = [&](double x) { return model.survival(x); };
    const numerics::QuadratureOptions opts{1e-14, 1e-12, 20};
    for (double d : {0.1, 0.5472, 1.5, 6.0}) {
        const auto t = truncated_moments(model, d);
        const double mu1 = numerics::integrate(sbar, 0.0, d, opts);
        const double mu2 = numerics::integrate([&](double x) { return 2.0 * x * sbar(x); }, 0.0, d, opts);
        const double nu1 = numerics::integrate_to_infinity(sbar, d, opts);
        const double nu2 =
            numerics::integrate_to_infinity([&](double x) { return 2.0 * (x - d) * sbar(x); }, d, opts);
        if (!close(t.mu1, mu1, 1e-8)) return fmt("mu1 at d=%g: quadrature %.17g", d, mu1);
        if (!close(t.mu2, mu2, 1e-8)) return fmt("mu2 at d=%g: quadrature %.17g", d, mu2);
        if (!close(t.nu1, nu1, 1e-8)) return fmt("nu1 at d=%g: quadrature %.17g", d, nu1);
        if (!close(t.nu2, nu2, 1e-8)) return fmt("nu2 at d=%g: quadrature %.17g", d, nu2);
    }
    return {};
}

std::string check_moment_derivatives() {
    const auto model = SeverityModel::pareto(9.0, 8.0);
    for (double d : {0.2, 0.8, 3.0}) {
        const double h = 1e-5 * d;
        const auto up = truncated_moments(model, d + h);
        const auto dn = truncated_moments(model, d - h);
        const auto t = truncated_moments(model, d);
        const double dmu1 = (up.mu1 - dn.mu1) / (2.0 * h);
        const double dnu2 = (up.nu2 - dn.nu2) / (2.0 * h);
        if (!close(dmu1, t.sbar, 1e-4)) return fmt("mu1' at d=%g is %.10g", d, dmu1);
        if (!close(dnu2, -2.0 * t.nu1, 1e-4)) return fmt("nu2' at d=%g is %.10g", d, dnu2);
    }
    return {};
}

std::string check_phi_closed_forms() {
    const auto es = DistortionMeasure::es(0.75);
    const double z = normal_quantile(0.75);
    const double es_closed = normal_pdf(z) / 0.25;
    if (!close(es.phi(), es_closed, 1e-10)) return fmt("ES0.75 phi %.17g vs %.17g", es.phi(), es_closed);
    if (!close(phi_h_choquet(es), es_closed, 1e-7)) return fmt("ES0.75 Choquet %.17g vs %.17g", phi_h_choquet(es), es_closed);
    const auto var = DistortionMeasure::var(0.75);
    if (!close(var.phi(), z, 1e-14)) return fmt("VaR0.75 phi %.17g vs %.17g", var.phi(), z);
    const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
    if (!close(DistortionMeasure::gini(1.0).phi(), inv_sqrt_pi, 1e-8))
        return fmt("Gini1 phi %.17g vs %.17g", DistortionMeasure::gini(1.0).phi(), inv_sqrt_pi);
    if (!close(DistortionMeasure::wang(1.0).phi(), 1.0, 1e-8))
        return fmt("Wang1 phi %.17g vs %.17g", DistortionMeasure::wang(1.0).phi(), 1.0);
    return {};
}

std::string check_known_optima() {
    const auto model = SeverityModel::pareto(9.0, 8.0);
    const auto measure = DistortionMeasure::var(0.75);
    const double dec = solve_retention(model, LoadingRule::decreasing(0.5), measure, 100).d_star;
    if (std::abs(dec - 0.5472) > 1e-3) return fmt("decreasing optimum %.6f, expected %.4f", dec, 0.5472);
    const double sl = stop_loss_retention(model, 0.2, 0.75);
    const double sl_closed = 8.0 * (std::pow(1.2, 1.0 / 9.0) - 1.0);
    if (!close(sl, sl_closed, 1e-12)) return fmt("stop-loss retention %.17g vs %.17g", sl, sl_closed);
    return {};
}

std::string check_determinism() {
    const auto model = SeverityModel::pareto(9.0, 8.0);
    if (sample(model, 1000, 7) != sample(model, 1000, 7)) return "sample() differs between identical seeds";
    const PortfolioDraws one(model, 10, 2000, 7, 0, 1);
    const PortfolioDraws many(model, 10, 2000, 7, 0, 4);
    std::vector<double> a;
    std::vector<double> b;
    one.capped_sums(0.8, a);
    many.capped_sums(0.8, b);
    if (a != b) return "simulated portfolios depend on the thread count";
    return {};
}

} // namespace

bool SelfCheckReport::passed() const {
    for (const auto& c : checks) {
        if (!c.passed) return false;
    }
    return true;
}

SelfCheckReport run_selfcheck(const QuantileTable& table) {
    const std::vector<std::pair<std::string, Check>> suite = {
        {"normal_quantile", [&] { return check_normal_quantile(table); }},
        {"moment_quadrature", check_moment_quadrature},
        {"moment_derivatives", check_moment_derivatives},
        {"phi_closed_forms", check_phi_closed_forms},
        {"known_optima", check_known_optima},
        {"seed_determinism", check_determinism},
    };
    SelfCheckReport report;
    const auto start = std::chrono::steady_clock::now();
    for (const auto& [name, check] : suite) {
        SelfCheckItem item;
        item.name = name;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            item.detail = check();
            item.passed = item.detail.empty();
        } catch (const std::exception& e) {
            item.detail = e.what();
        }
        item.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        report.checks.push_back(std::move(item));
    }
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

} // namespace xol
