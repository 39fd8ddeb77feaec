#pragma once

#include <array>

namespace p53hopf {

/// Rate constants and Hill parameters of the delayed P53-MDM2 system
///
///   x1' = 1 - b1 x1
///   y1' = x1 - (a1 + a12 y2(t-tau)) y1
///   x2' = f(y1(t-tau)) - b2 x2
///   y2' = x2 - (a2 + a21 y1(t-tau)) y2
///
/// with f(x) = x^n / (a + x^n). Transcription, translation and maximal
/// activation rates are fixed to 1. Setting a21 = 0 and tau = 0 recovers the
/// original four-variable model without the P53-induced MDM2 degradation.
struct ModelParams {
    double a1 = 0.13;  ///< P53 protein degradation rate
    double a2 = 0.13;  ///< MDM2 protein degradation rate
    double a12 = 0.02; ///< MDM2-induced P53 degradation
    double a21 = 0.02; ///< P53-induced MDM2 degradation
    double b1 = 0.8;   ///< p53 mRNA degradation rate
    double b2 = 0.01;  ///< mdm2 mRNA degradation rate
    double a = 4.0;    ///< Hill half-saturation constant (concentration^n)
    int n = 2;         ///< Hill exponent
};

/// Throws DomainError unless a1, a2, b1, b2 lie in (0, 1], the coupling rates
/// a12, a21 lie in [0, 1], a > 0 and n >= 1. Zero coupling is admitted so the
/// decoupled limits can be analysed.
void validate(const ModelParams& p);

struct StateVec {
    double x1 = 0.0; ///< p53 mRNA
    double y1 = 0.0; ///< P53 protein
    double x2 = 0.0; ///< mdm2 mRNA
    double y2 = 0.0; ///< MDM2 protein

    [[nodiscard]] std::array<double, 4> to_array() const { return {x1, y1, x2, y2}; }
    static StateVec from_array(const std::array<double, 4>& v) { return {v[0], v[1], v[2], v[3]}; }

    StateVec& operator+=(const StateVec& o);
    StateVec& operator-=(const StateVec& o);
    StateVec& operator*=(double s);
    friend StateVec operator+(StateVec l, const StateVec& r) { return l += r; }
    friend StateVec operator-(StateVec l, const StateVec& r) { return l -= r; }
    friend StateVec operator*(double s, StateVec v) { return v *= s; }
    friend bool operator==(const StateVec&, const StateVec&) = default;
};

[[nodiscard]] double norm(const StateVec& v);
[[nodiscard]] bool is_finite(const StateVec& v);

struct HillDerivatives {
    double rho1 = 0.0;
    double rho2 = 0.0;
    double rho3 = 0.0;
};

/// f(x) = x^n / (a + x^n), evaluated as 1 / (1 + a x^-n) so that large n
/// neither overflows nor underflows. Throws DomainError for x < 0.
[[nodiscard]] double hill_eval(double x, const ModelParams& p);

/// First three derivatives of the Hill function. Written in terms of
/// f and q = 1 - f to avoid cancellation at large n:
///   f'   = n f q / x
///   f''  = f' (n (1 - 2f) - 1) / x
///   f''' = (f'' (n (1 - 2f) - 2) - 2 n f'^2) / x
/// x = 0 is accepted only for n >= 3, where the limits are finite.
[[nodiscard]] HillDerivatives hill_derivs(double x, const ModelParams& p);

/// Right-hand side of the model. `delayed` supplies the lagged state; only
/// its y1 and y2 components are read.
[[nodiscard]] StateVec rhs(const StateVec& state, const StateVec& delayed, const ModelParams& p);

} // namespace p53hopf
