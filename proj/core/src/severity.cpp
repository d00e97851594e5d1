#include "xol/severity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "xol/error.hpp"
#include "xol/normal.hpp"
#include "xol/numerics.hpp"
#include "xol/rng.hpp"

namespace xol {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// (u^k − 1)/k with the k → 0 limit log(u).
double pow_ratio(double u, double k) {
    const double lu = std::log(u);
    if (std::abs(k) < 1e-12) return lu;
    return std::expm1(k * lu) / k;
}

std::size_t ceil_index(double u, std::size_t n) {
    const double pos = u * static_cast<double>(n);
    const double k = std::ceil(pos - 1e-9 * std::max(1.0, pos));
    return static_cast<std::size_t>(std::clamp(k, 1.0, static_cast<double>(n)));
}

TruncatedMoments pareto_moments(const ParetoII& m, double d, MomentNeeds needs) {
    const double a = m.alpha;
    const double l = m.lambda;
    const double u = 1.0 + d / l;
    TruncatedMoments t;
    t.d = d;
    t.sbar = std::pow(u, -a);
    t.mu1 = l * pow_ratio(u, 1.0 - a);
    t.mu2 = 2.0 * l * l * (pow_ratio(u, 2.0 - a) - pow_ratio(u, 1.0 - a));
    if (a <= 1.0) {
        fail(ErrorCode::NonfiniteMoment, "Pareto II with alpha <= 1 has an infinite mean excess");
    }
    t.nu1 = l / (a - 1.0) * std::pow(u, 1.0 - a);
    if (a > 2.0) {
        t.nu2 = 2.0 * l * l / ((a - 1.0) * (a - 2.0)) * std::pow(u, 2.0 - a);
    } else if (needs == MomentNeeds::All) {
        fail(ErrorCode::NonfiniteMoment,
             "Pareto II with alpha <= 2 has an infinite second excess moment");
    } else {
        t.nu2 = kInf;
    }
    return t;
}

// ∫_0^d g(x) f(x) dx for Pareto, split on a geometric ladder of λ so the
// adaptive rule sees the bulk of the mass even for very large d.
double pareto_expect_below(const ParetoII& m, double d, const std::function<double(double)>& g) {
    const numerics::QuadratureOptions opts{1e-15, 1e-10, 15};
    auto integrand = [&](double x) {
        return g(x) * m.alpha / m.lambda * std::pow(1.0 + x / m.lambda, -m.alpha - 1.0);
    };
    double total = 0.0;
    double lo = 0.0;
    double step = m.lambda;
    while (lo < d) {
        const double hi = std::min(d, lo + step);
        total += numerics::integrate(integrand, lo, hi, opts);
        lo = hi;
        step *= 2.0;
    }
    return total;
}

} // namespace

// ---------------------------------------------------------------------------
// EmpiricalSample

EmpiricalSample::EmpiricalSample(std::vector<double> losses) : x_(std::move(losses)) {
    if (x_.size() < 1) fail(ErrorCode::InvalidArgument, "empirical sample needs at least one loss");
    for (double v : x_) {
        if (!std::isfinite(v) || v < 0.0) {
            fail(ErrorCode::InvalidArgument, "losses must be finite and nonnegative");
        }
    }
    std::sort(x_.begin(), x_.end());
    s1_.resize(x_.size() + 1);
    s2_.resize(x_.size() + 1);
    s1_[0] = s2_[0] = 0.0L;
    for (std::size_t i = 0; i < x_.size(); ++i) {
        const long double v = x_[i];
        s1_[i + 1] = s1_[i] + v;
        s2_[i + 1] = s2_[i] + v * v;
    }
}

double EmpiricalSample::mean() const {
    return static_cast<double>(s1_.back() / static_cast<long double>(x_.size()));
}

std::size_t EmpiricalSample::count_above(double d) const {
    return static_cast<std::size_t>(x_.end() - std::upper_bound(x_.begin(), x_.end(), d));
}

double EmpiricalSample::survival(double d) const {
    return static_cast<double>(count_above(d)) / static_cast<double>(x_.size());
}

TruncatedMoments EmpiricalSample::moments(double d) const {
    const std::size_t n = x_.size();
    const std::size_t k = n - count_above(d); // x_[0..k) <= d
    const long double nl = static_cast<long double>(n);
    const long double above = static_cast<long double>(n - k);
    const long double dl = d;
    const long double t1 = s1_[n] - s1_[k];
    const long double t2 = s2_[n] - s2_[k];

    TruncatedMoments t;
    t.d = d;
    t.sbar = static_cast<double>(above / nl);
    t.mu1 = static_cast<double>((s1_[k] + above * dl) / nl);
    t.mu2 = static_cast<double>((s2_[k] + above * dl * dl) / nl);
    t.nu1 = static_cast<double>((t1 - above * dl) / nl);
    t.nu2 = static_cast<double>(std::max(0.0L, (t2 - 2.0L * dl * t1 + above * dl * dl) / nl));
    return t;
}

double EmpiricalSample::quantile(double u) const {
    if (u >= 1.0) return x_.back();
    if (u <= 0.0) return x_.front();
    return x_[ceil_index(u, x_.size()) - 1];
}

double EmpiricalSample::upper_quantile(double u) const {
    if (u < 0.0) return x_.front();
    const double pos = u * static_cast<double>(x_.size());
    const auto m = static_cast<std::size_t>(std::floor(pos + 1e-9 * std::max(1.0, pos)));
    if (m >= x_.size()) return kInf;
    return x_[m];
}

EmpiricalSample EmpiricalSample::scaled(double c) const {
    std::vector<double> y(x_);
    for (double& v : y) v *= c;
    return EmpiricalSample(std::move(y));
}

// ---------------------------------------------------------------------------
// SeverityModel

SeverityModel SeverityModel::pareto(double alpha, double lambda) {
    if (!(alpha > 0.0) || !(lambda > 0.0) || !std::isfinite(alpha) || !std::isfinite(lambda)) {
        fail(ErrorCode::InvalidArgument, "Pareto II requires alpha > 0 and lambda > 0");
    }
    return SeverityModel(ParetoII{alpha, lambda});
}

SeverityModel SeverityModel::empirical(std::vector<double> losses) {
    if (losses.size() < 2) fail(ErrorCode::InvalidArgument, "empirical model needs at least two losses");
    return SeverityModel(EmpiricalSample(std::move(losses)));
}

SeverityModel SeverityModel::empirical(EmpiricalSample sample) {
    if (sample.size() < 2) fail(ErrorCode::InvalidArgument, "empirical model needs at least two losses");
    return SeverityModel(std::move(sample));
}

double SeverityModel::survival(double x) const {
    if (const auto* p = std::get_if<ParetoII>(&v_)) {
        if (x <= 0.0) return 1.0;
        return std::pow(1.0 + x / p->lambda, -p->alpha);
    }
    return std::get<EmpiricalSample>(v_).survival(x);
}

double SeverityModel::density(double x) const {
    const auto* p = std::get_if<ParetoII>(&v_);
    if (p == nullptr) fail(ErrorCode::InvalidArgument, "density is defined for parametric models only");
    if (x < 0.0) return 0.0;
    return p->alpha / p->lambda * std::pow(1.0 + x / p->lambda, -p->alpha - 1.0);
}

double SeverityModel::mean() const {
    if (const auto* p = std::get_if<ParetoII>(&v_)) {
        if (p->alpha <= 1.0) return kInf;
        return p->lambda / (p->alpha - 1.0);
    }
    return std::get<EmpiricalSample>(v_).mean();
}

double SeverityModel::quantile(double u) const {
    if (const auto* p = std::get_if<ParetoII>(&v_)) {
        if (u <= 0.0) return 0.0;
        if (u >= 1.0) return kInf;
        return p->lambda * std::expm1(-std::log1p(-u) / p->alpha);
    }
    return std::get<EmpiricalSample>(v_).quantile(u);
}

double SeverityModel::upper_quantile(double u) const {
    if (is_pareto()) return quantile(u);
    return std::get<EmpiricalSample>(v_).upper_quantile(u);
}

double SeverityModel::tail_index() const {
    if (const auto* p = std::get_if<ParetoII>(&v_)) return p->alpha;
    return 0.0;
}

SeverityModel SeverityModel::scaled(double c) const {
    if (!(c > 0.0)) fail(ErrorCode::InvalidArgument, "scale factor must be positive");
    if (const auto* p = std::get_if<ParetoII>(&v_)) return pareto(p->alpha, p->lambda * c);
    return SeverityModel(std::get<EmpiricalSample>(v_).scaled(c));
}

// ---------------------------------------------------------------------------
// Free operations

double survival(const SeverityModel& model, double x) {
    if (x < 0.0) fail(ErrorCode::InvalidArgument, "survival: x must be nonnegative");
    return model.survival(x);
}

TruncatedMoments truncated_moments(const SeverityModel& model, double d, MomentNeeds needs) {
    if (!(d >= 0.0)) fail(ErrorCode::InvalidArgument, "truncated_moments: d must be nonnegative");
    if (model.is_pareto()) return pareto_moments(model.as_pareto(), d, needs);
    return model.as_empirical().moments(d);
}

HigherTruncatedMoments higher_truncated_moments(const SeverityModel& model, double d) {
    if (!(d > 0.0)) fail(ErrorCode::InvalidArgument, "higher_truncated_moments: d must be positive");
    HigherTruncatedMoments h;
    h.d = d;
    double c2 = 0.0;
    double c3 = 0.0;
    double c4 = 0.0;
    if (model.is_pareto()) {
        const auto& p = model.as_pareto();
        const double sbar = model.survival(d);
        const double mu = pareto_moments(p, d, MomentNeeds::FirstExcess).mu1;
        auto ipow = [](double v, int k) {
            double r = 1.0;
            for (int i = 0; i < k; ++i) r *= v;
            return r;
        };
        auto central = [&](int k) {
            return pareto_expect_below(p, d, [&](double x) { return ipow(x - mu, k); }) +
                   ipow(d - mu, k) * sbar;
        };
        h.m3 = pareto_expect_below(p, d, [](double x) { return x * x * x; }) + d * d * d * sbar;
        h.m4 = pareto_expect_below(p, d, [](double x) { return x * x * x * x; }) + d * d * d * d * sbar;
        c2 = central(2);
        c3 = central(3);
        c4 = central(4);
    } else {
        const auto xs = model.as_empirical().sorted();
        const double n = static_cast<double>(xs.size());
        double mu = 0.0;
        for (double x : xs) mu += std::min(x, d);
        mu /= n;
        for (double x : xs) {
            const double y = std::min(x, d);
            const double e = y - mu;
            h.m3 += y * y * y;
            h.m4 += y * y * y * y;
            c2 += e * e;
            c3 += e * e * e;
            c4 += e * e * e * e;
        }
        h.m3 /= n;
        h.m4 /= n;
        c2 /= n;
        c3 /= n;
        c4 /= n;
    }
    if (!(c2 > 0.0)) fail(ErrorCode::DegenerateVariance, "Var(X∧d) is zero");
    h.kappa3 = c3 / std::pow(c2, 1.5);
    h.kappa4 = c4 / (c2 * c2) - 3.0;
    return h;
}

double draw(const SeverityModel& model, Rng& rng) {
    const double u = rng.uniform();
    if (model.is_pareto()) {
        const auto& p = model.as_pareto();
        // λ((1−U)^(−1/α) − 1)
        return p.lambda * std::expm1(-std::log1p(-u) / p.alpha);
    }
    const auto xs = model.as_empirical().sorted();
    auto idx = static_cast<std::size_t>(u * static_cast<double>(xs.size()));
    if (idx >= xs.size()) idx = xs.size() - 1;
    return xs[idx];
}

std::vector<double> sample(const SeverityModel& model, std::size_t n, std::uint64_t seed) {
    if (n == 0) fail(ErrorCode::InvalidArgument, "sample: n must be positive");
    Rng rng(seed);
    std::vector<double> out(n);
    for (auto& v : out) v = draw(model, rng);
    return out;
}

double kde_density(std::span<const double> losses, double x, double bandwidth) {
    if (losses.empty()) fail(ErrorCode::InvalidArgument, "kde_density: empty sample");
    if (!(bandwidth > 0.0)) fail(ErrorCode::InvalidArgument, "kde_density: bandwidth must be positive");
    double acc = 0.0;
    for (double xi : losses) acc += normal_pdf((x - xi) / bandwidth);
    return acc / (static_cast<double>(losses.size()) * bandwidth);
}

LossSummary summary_and_lorenz(std::span<const double> losses) {
    if (losses.empty()) fail(ErrorCode::InvalidArgument, "summary: empty sample");
    std::vector<double> xs(losses.begin(), losses.end());
    for (double v : xs) {
        if (!std::isfinite(v) || v < 0.0) fail(ErrorCode::InvalidArgument, "losses must be nonnegative");
    }
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    long double total = 0.0L;
    for (double v : xs) total += v;
    if (total <= 0.0L) fail(ErrorCode::AllZero, "total loss is zero");

    LossSummary s;
    s.count = n;
    s.total = static_cast<double>(total);
    s.mean = static_cast<double>(total / static_cast<long double>(n));
    s.median = (n % 2 == 1) ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
    s.max = xs.back();
    s.lorenz.reserve(n + 1);
    s.lorenz.emplace_back(0.0, 0.0);
    long double running = 0.0L;
    for (std::size_t k = 1; k <= n; ++k) {
        running += xs[k - 1];
        const double share = (k == n) ? 1.0 : static_cast<double>(running / total);
        s.lorenz.emplace_back(static_cast<double>(k) / static_cast<double>(n), share);
    }
    return s;
}

} // namespace xol
