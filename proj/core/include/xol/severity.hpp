#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace xol {

// Pareto type II (Lomax): F̄(x) = (1 + x/λ)^(−α), x ≥ 0.
// Mean is λ/(α−1) for α > 1.
struct ParetoII {
    double alpha;
    double lambda;
};

// (F̄(d), E(X∧d), E(X²∧d²), E(X−d)₊, E(X−d)₊²) at retention d.
struct TruncatedMoments {
    double d = 0.0;
    double sbar = 0.0;
    double mu1 = 0.0;
    double mu2 = 0.0;
    double nu1 = 0.0;
    double nu2 = 0.0;

    double capped_variance() const { return mu2 - mu1 * mu1; }
    double excess_variance() const { return nu2 - nu1 * nu1; }
};

struct HigherTruncatedMoments {
    double d = 0.0;
    double m3 = 0.0;     // E(X∧d)³
    double m4 = 0.0;     // E(X∧d)⁴
    double kappa3 = 0.0; // standardized skewness of X∧d
    double kappa4 = 0.0; // excess kurtosis of X∧d
};

// Sorted loss sample with prefix sums; every plug-in moment is O(log N).
class EmpiricalSample {
public:
    explicit EmpiricalSample(std::vector<double> losses);

    std::size_t size() const { return x_.size(); }
    std::span<const double> sorted() const { return x_; }
    double min() const { return x_.front(); }
    double max() const { return x_.back(); }
    double mean() const;

    // Number of observations strictly greater than d.
    std::size_t count_above(double d) const;
    double survival(double d) const;
    TruncatedMoments moments(double d) const;

    // inf{x : F̂(x) ≥ u}
    double quantile(double u) const;
    // sup{x : F̂(x) ≤ u}, i.e. the right end of a plateau of F̂ at level u.
    double upper_quantile(double u) const;

    EmpiricalSample scaled(double c) const;

private:
    std::vector<double> x_;
    std::vector<long double> s1_; // s1_[k] = Σ_{i<k} x_i
    std::vector<long double> s2_; // s2_[k] = Σ_{i<k} x_i²
};

class SeverityModel {
public:
    static SeverityModel pareto(double alpha, double lambda);
    static SeverityModel empirical(std::vector<double> losses);
    static SeverityModel empirical(EmpiricalSample sample);

    bool is_pareto() const { return std::holds_alternative<ParetoII>(v_); }
    bool is_empirical() const { return std::holds_alternative<EmpiricalSample>(v_); }
    const ParetoII& as_pareto() const { return std::get<ParetoII>(v_); }
    const EmpiricalSample& as_empirical() const { return std::get<EmpiricalSample>(v_); }

    double survival(double x) const;
    double cdf(double x) const { return 1.0 - survival(x); }
    // Density; Pareto only (empirical callers use kde_density).
    double density(double x) const;
    double mean() const;
    double quantile(double u) const;
    double upper_quantile(double u) const;
    // Right tail index for regularly varying models; 0 when unknown.
    double tail_index() const;

    // Model of cX.
    SeverityModel scaled(double c) const;

private:
    using Variant = std::variant<ParetoII, EmpiricalSample>;
    explicit SeverityModel(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

enum class MomentNeeds {
    FirstExcess, // F̄, μ₁, μ₂, ν₁ (ν₂ may be infinite)
    All,
};

double survival(const SeverityModel& model, double x);

// Throws NonfiniteMoment when a requested moment is infinite (Pareto α ≤ 1
// for ν₁, α ≤ 2 for ν₂).
TruncatedMoments truncated_moments(const SeverityModel& model, double d,
                                   MomentNeeds needs = MomentNeeds::All);

// Throws DegenerateVariance when Var(X∧d) = 0.
HigherTruncatedMoments higher_truncated_moments(const SeverityModel& model, double d);

// Deterministic given (model, n, seed).
std::vector<double> sample(const SeverityModel& model, std::size_t n, std::uint64_t seed);

class Rng;
double draw(const SeverityModel& model, Rng& rng);

// Gaussian-kernel density estimate at x.
double kde_density(std::span<const double> losses, double x, double bandwidth);

struct LossSummary {
    std::size_t count = 0;
    double mean = 0.0;
    double median = 0.0;
    double max = 0.0;
    double total = 0.0;
    std::vector<std::pair<double, double>> lorenz; // (k/N, share of k smallest)
};

// Throws AllZero if the losses sum to zero.
LossSummary summary_and_lorenz(std::span<const double> losses);

} // namespace xol
