#pragma once

#include <span>
#include <vector>

#include "p53hopf/model.hpp"

namespace p53hopf {

/// Positive steady state of the model together with the Hill derivatives
/// evaluated at y10.
struct Equilibrium {
    double x10 = 0.0;
    double y10 = 0.0;
    double x20 = 0.0;
    double y20 = 0.0;
    double rho1 = 0.0;
    double rho2 = 0.0;
    double rho3 = 0.0;

    [[nodiscard]] StateVec state() const { return {x10, y10, x20, y20}; }
};

/// Coefficients (ascending by degree, length n + 3) of the polynomial whose
/// positive roots are the admissible y10 values:
///
///   k(x) = a1 b1 b2 a21 x^{n+2} + (b1 a12 - b2 a21 + a1 b1 a2 b2) x^{n+1} - a2 b2 x^n
///          + a1 b1 b2 a a21 x^2 + (b1 a a2 a1 b2 - b2 a a21) x - a a2 b2
///
/// Coefficients of coinciding degrees (small n) are summed.
[[nodiscard]] std::vector<double> equilibrium_poly_coeffs(const ModelParams& p);

/// Polynomial value scaled to stay finite for large degree: returns k(x) for
/// x <= 1 and k(x) / x^deg for x > 1, summed with Neumaier compensation in
/// the order of decreasing term magnitude (ascending powers below 1,
/// descending above). The sign always equals the sign of k(x).
[[nodiscard]] double poly_eval_scaled(std::span<const double> coeffs, double x);

/// Derivative of k with the same scaling as poly_eval_scaled, so the ratio
/// of the two is the Newton step k(x)/k'(x).
[[nodiscard]] double poly_deriv_scaled(std::span<const double> coeffs, double x);

/// All positive real roots of a polynomial with negative constant term,
/// ascending. Roots are bracketed by a geometric sign scan between the
/// Cauchy lower and upper root bounds, then bisected and Newton-polished.
/// Roots of even multiplicity (no sign change) are not reported.
/// Throws NumericalError when a bracket fails to converge.
[[nodiscard]] std::vector<double> find_positive_roots(std::span<const double> coeffs);

/// Assembles the steady state for a verified root y10. Throws DomainError if
/// the scaled residual |k(y10)| exceeds 1e-10 max|coeff|.
[[nodiscard]] Equilibrium build_equilibrium(const ModelParams& p, double y10);

/// Every positive equilibrium of `p`, ordered by y10.
[[nodiscard]] std::vector<Equilibrium> compute_equilibria(const ModelParams& p);

} // namespace p53hopf
