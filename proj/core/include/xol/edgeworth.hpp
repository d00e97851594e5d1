#pragma once

#include <cstddef>

#include "xol/retention.hpp"
#include "xol/severity.hpp"

namespace xol {

inline double hermite2(double x) { return x * x - 1.0; }
inline double hermite3(double x) { return x * x * x - 3.0 * x; }
inline double hermite5(double x) { return x * x * x * x * x - 10.0 * x * x * x + 15.0 * x; }

// Where the Hermite polynomials in the Cornish–Fisher terms are evaluated:
// at the risk level p itself, or at z_p = Φ⁻(p).
enum class HermiteArgument { RiskLevel, NormalQuantile };

struct EdgeworthConvention {
    HermiteArgument argument = HermiteArgument::RiskLevel;
    // Sign of the first-order term: p̃₁ = sign·κ̃₃·H₂(x)/6.
    int first_order_sign = +1;
};

// First- and second-order Cornish–Fisher corrections at retention d.
struct CornishFisherTerms {
    double p1 = 0.0;
    double p2 = 0.0;
};

CornishFisherTerms cornish_fisher_terms(const HigherTruncatedMoments& m, double p,
                                        const EdgeworthConvention& convention);

// Edgeworth-corrected risk of total cost under a constant loading ρ:
//   G⁽²⁾ = N·E(X) + N·ρ·ν₁ + √N·√(μ₂−μ₁²)·(z_p + p̃₁/√N)
//   G⁽³⁾ = G⁽²⁾ + √N·√(μ₂−μ₁²)·p̃₂/N
double edgeworth_objective(const SeverityModel& model, double rho, double p, std::size_t n, int order,
                           double d, const EdgeworthConvention& convention = {});

// Minimizer of G⁽ᵒʳᵈᵉʳ⁾ for order ∈ {2, 3} by grid scan and golden-section
// refinement. Throws NoInteriorMinimum if the grid minimum is on the boundary.
RetentionSolution solve_retention_edgeworth(const SeverityModel& model, double rho, double p,
                                            std::size_t n, int order,
                                            const EdgeworthConvention& convention = {},
                                            const SolveOptions& options = {});

} // namespace xol
