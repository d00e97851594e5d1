#pragma once

#include <string>
#include <string_view>

namespace xol {

enum class DistortionKind { VaR, ES, DualPower, Gini, PHT, Wang };

// Distortion risk measure. h is applied to survival probabilities, so the
// measure of a loss L is ∫ h(P(L > x)) dx (Choquet integral). φ_h(Z), the
// measure of a standard normal Z, is computed once at construction.
class DistortionMeasure {
public:
    static DistortionMeasure var(double p);
    static DistortionMeasure es(double p);
    static DistortionMeasure dual_power(double beta);
    static DistortionMeasure gini(double beta);
    static DistortionMeasure pht(double beta);
    static DistortionMeasure wang(double beta);

    // "var:0.75", "es:0.9", "dualpower:2", "gini:0.5", "pht:0.3", "wang:1".
    static DistortionMeasure parse(std::string_view text);

    DistortionKind kind() const { return kind_; }
    double param() const { return param_; }
    // φ_h(Z) = ∫₀¹ Φ⁻(1−t) dh(t)
    double phi() const { return phi_; }

    double h(double s) const;
    // Derivative of h on (0,1). Throws InvalidArgument for VaR (step function).
    double h_prime(double s) const;

    std::string to_string() const;

private:
    DistortionMeasure(DistortionKind kind, double param);
    DistortionKind kind_;
    double param_;
    double phi_;
};

double distortion_h(const DistortionMeasure& measure, double s);

// Closed form for VaR and ES, quadrature over h′ for the smooth distortions.
double phi_h_normal(const DistortionMeasure& measure);

// Independent evaluation as the Choquet integral
// ∫₀^∞ h(Φ̄(x)) dx − ∫_{−∞}^0 (1 − h(Φ̄(x))) dx. Valid for every variant,
// including the VaR step; used for cross-checks.
double phi_h_choquet(const DistortionMeasure& measure);

} // namespace xol
