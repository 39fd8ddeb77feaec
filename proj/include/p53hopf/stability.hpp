#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "p53hopf/equilibrium.hpp"
#include "p53hopf/model.hpp"

namespace p53hopf {

/// Linearisation X'(t) = A X(t) + B X(t - tau) about an equilibrium.
struct LinearPair {
    Eigen::Matrix4d A;
    Eigen::Matrix4d B;
};

/// Coefficients of the non-trivial factor of the characteristic equation
///
///   (lambda + b1) (lambda^3 + b lambda^2 + c lambda + d + (g lambda + h) e^{-2 lambda tau}) = 0
///
/// and of the frequency cubic z^3 + l1 z^2 + l2 z + l3 = 0 (z = omega^2).
struct CharCoeffs {
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
    double g = 0.0;
    double h = 0.0;
    double l1 = 0.0;
    double l2 = 0.0;
    double l3 = 0.0;
};

/// A root lambda = i omega of the characteristic equation crossing the
/// imaginary axis at delay tau.
struct HopfPoint {
    double omega_c = 0.0;
    double tau_c = 0.0;
    int branch = 0;                             ///< k in tau_k
    std::complex<double> dlambda_dtau;          ///< implicit differentiation
    double L1 = 0.0;                            ///< auxiliaries of the printed closed form
    double L2 = 0.0;
    std::complex<double> dlambda_dtau_printed;  ///< printed closed form, for comparison only
};

/// One (omega, tau_k) pair from the branch family of a frequency candidate.
struct DelayCandidate {
    double omega = 0.0;
    int branch = 0;
    double tau = 0.0;
    double modulus_defect = 0.0; ///< ||G(i omega)| - 1|
    double residual = 0.0;       ///< |Delta(i omega, tau)|
    std::complex<double> dlambda_dtau;
};

enum class StabilityVerdict { stable, unstable, at_bifurcation };

[[nodiscard]] const char* to_string(StabilityVerdict v);

[[nodiscard]] LinearPair linearize(const ModelParams& p, const Equilibrium& eq);

[[nodiscard]] CharCoeffs char_coeffs(const ModelParams& p, const Equilibrium& eq);

/// Routh-Hurwitz test for the undelayed cubic
/// lambda^3 + b lambda^2 + (c+g) lambda + (d+h): b > 0, d + h > 0 and
/// (c+g) b > d + h. The remaining factor lambda + b1 is always stable.
[[nodiscard]] bool routh_hurwitz_stable(const CharCoeffs& cc);

/// Number of characteristic roots with positive real part at tau = 0, from
/// sign changes in the first column of the Routh array.
[[nodiscard]] int unstable_root_count_undelayed(const CharCoeffs& cc);

/// Delta(lambda, tau) = lambda^3 + b lambda^2 + c lambda + d + (g lambda + h) e^{-2 lambda tau}.
[[nodiscard]] std::complex<double> char_function(const CharCoeffs& cc, std::complex<double> lambda, double tau);

/// G(lambda) = -(g lambda + h) / (lambda^3 + b lambda^2 + c lambda + d).
[[nodiscard]] std::complex<double> delay_ratio(const CharCoeffs& cc, std::complex<double> lambda);

/// Real roots of z^3 + l1 z^2 + l2 z + l3, ascending. Closed form
/// (trigonometric for three real roots, Cardano otherwise) followed by a
/// Newton polish.
[[nodiscard]] std::vector<double> real_cubic_roots(double l1, double l2, double l3);

/// Crossing frequencies omega = sqrt(z) for the positive roots z of the
/// frequency cubic, ascending. Empty when no positive root exists.
[[nodiscard]] std::vector<double> omega_candidates(const CharCoeffs& cc);

/// True when z = omega^2 is a simple root: |F'(z)| > 1e-10.
[[nodiscard]] bool is_simple_frequency(const CharCoeffs& cc, double omega);

/// tau_k = (arg G(i omega) + 2 k pi) / (2 omega), k = 0..k_max, with arg in
/// [0, 2 pi); positive values only, ascending. Throws PreconditionError when
/// |G(i omega)| differs from 1 by more than 1e-8.
[[nodiscard]] std::vector<double> critical_delays(double omega, const CharCoeffs& cc, int k_max = 8);

/// d lambda / d tau at (i omega, tau) from implicit differentiation of Delta:
///
///   2 lambda (g lambda + h) e^{-2 lambda tau}
///   ------------------------------------------------------------------
///   3 lambda^2 + 2 b lambda + c + (g - 2 tau (g lambda + h)) e^{-2 lambda tau}
///
/// Throws NumericalError when the denominator vanishes (double root).
[[nodiscard]] std::complex<double> transversality(double omega, double tau, const CharCoeffs& cc);

struct PrintedTransversality {
    double L1 = 0.0;
    double L2 = 0.0;
    std::complex<double> value;
};

/// The L1/L2 closed form as published, kept for cross-checking. It does not
/// agree with implicit differentiation in general.
[[nodiscard]] PrintedTransversality transversality_printed(double omega, double tau, const CharCoeffs& cc);

/// Every (omega, tau_k) pair over all simple frequency candidates, sorted by tau.
[[nodiscard]] std::vector<DelayCandidate> delay_candidates(const CharCoeffs& cc, int k_max = 8);

/// The smallest positive critical delay over all simple frequency
/// candidates, or nullopt when the frequency cubic has no positive root.
[[nodiscard]] std::optional<HopfPoint> find_hopf_point(const CharCoeffs& cc, int k_max = 8);

/// Stability of the equilibrium at delay tau: the unstable-root count at
/// tau = 0 is advanced by +-2 at every crossing tau_k < tau according to the
/// sign of Re(d lambda / d tau). Within 1e-9 of a crossing the verdict is
/// at_bifurcation.
[[nodiscard]] StabilityVerdict classify_stability(const ModelParams& p, const Equilibrium& eq, double tau);

} // namespace p53hopf
