#include "p53hopf/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "p53hopf/errors.hpp"

namespace p53hopf {

namespace {

using cplx = std::complex<double>;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double cubic_value(double l1, double l2, double l3, double z) {
    return ((z + l1) * z + l2) * z + l3;
}

double cubic_slope(double l1, double l2, double z) {
    return (3.0 * z + 2.0 * l1) * z + l2;
}

cplx cubic_part(const CharCoeffs& cc, cplx lambda) {
    return ((lambda + cc.b) * lambda + cc.c) * lambda + cc.d;
}

} // namespace

const char* to_string(StabilityVerdict v) {
    switch (v) {
    case StabilityVerdict::stable:
        return "stable";
    case StabilityVerdict::unstable:
        return "unstable";
    case StabilityVerdict::at_bifurcation:
        return "at-bifurcation";
    }
    return "unknown";
}

LinearPair linearize(const ModelParams& p, const Equilibrium& eq) {
    LinearPair lp;
    lp.A.setZero();
    lp.B.setZero();
    lp.A(0, 0) = -p.b1;
    lp.A(1, 0) = 1.0;
    lp.A(1, 1) = -p.a1 - p.a12 * eq.y20;
    lp.A(2, 2) = -p.b2;
    lp.A(3, 2) = 1.0;
    lp.A(3, 3) = -p.a2 - p.a21 * eq.y10;
    lp.B(1, 3) = -p.a12 * eq.y10;
    lp.B(2, 1) = eq.rho1;
    lp.B(3, 1) = -p.a21 * eq.y20;
    return lp;
}

CharCoeffs char_coeffs(const ModelParams& p, const Equilibrium& eq) {
    const double alpha1 = p.a1 + p.a12 * eq.y20;
    const double alpha2 = p.a2 + p.a21 * eq.y10;
    CharCoeffs cc;
    cc.b = p.a1 + p.a2 + p.b2 + p.a12 * eq.y20 + p.a21 * eq.y10;
    cc.c = p.b2 * (alpha1 + alpha2) + alpha1 * alpha2;
    cc.d = p.b2 * alpha1 * alpha2;
    cc.g = -p.a12 * eq.y10 * p.a21 * eq.y20;
    cc.h = -p.a12 * eq.y10 * (p.b2 * p.a21 * eq.y20 - eq.rho1);
    cc.l1 = cc.b * cc.b - 2.0 * cc.c;
    cc.l2 = cc.c * cc.c - 2.0 * cc.b * cc.d - cc.g * cc.g;
    cc.l3 = cc.d * cc.d - cc.h * cc.h;
    return cc;
}

bool routh_hurwitz_stable(const CharCoeffs& cc) {
    return cc.b > 0.0 && cc.d + cc.h > 0.0 && (cc.c + cc.g) * cc.b > cc.d + cc.h;
}

int unstable_root_count_undelayed(const CharCoeffs& cc) {
    // Routh array of lambda^3 + b lambda^2 + (c+g) lambda + (d+h).
    const double c1 = cc.c + cc.g;
    const double d1 = cc.d + cc.h;
    const double column[4] = {1.0, cc.b, cc.b != 0.0 ? (cc.b * c1 - d1) / cc.b : 0.0, d1};
    int changes = 0;
    for (int i = 0; i + 1 < 4; ++i) {
        if ((column[i] < 0.0) != (column[i + 1] < 0.0)) {
            ++changes;
        }
    }
    return changes;
}

std::complex<double> char_function(const CharCoeffs& cc, cplx lambda, double tau) {
    return cubic_part(cc, lambda) + (cc.g * lambda + cc.h) * std::exp(-2.0 * lambda * tau);
}

std::complex<double> delay_ratio(const CharCoeffs& cc, cplx lambda) {
    return -(cc.g * lambda + cc.h) / cubic_part(cc, lambda);
}

std::vector<double> real_cubic_roots(double l1, double l2, double l3) {
    // z = t - l1/3 gives t^3 + p t + q = 0.
    const double shift = l1 / 3.0;
    const double p = l2 - l1 * l1 / 3.0;
    const double q = 2.0 * l1 * l1 * l1 / 27.0 - l1 * l2 / 3.0 + l3;
    const double disc = q * q / 4.0 + p * p * p / 27.0;

    std::vector<double> roots;
    if (p == 0.0 && q == 0.0) {
        roots.push_back(-shift);
    } else if (disc <= 0.0 && p < 0.0) {
        const double r = 2.0 * std::sqrt(-p / 3.0);
        const double arg = std::clamp(3.0 * q / (p * r), -1.0, 1.0);
        const double phi = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k) {
            roots.push_back(r * std::cos(phi - kTwoPi * k / 3.0) - shift);
        }
    } else {
        const double s = std::sqrt(std::max(disc, 0.0));
        roots.push_back(std::cbrt(-q / 2.0 + s) + std::cbrt(-q / 2.0 - s) - shift);
    }
    for (double& z : roots) {
        for (int it = 0; it < 3; ++it) {
            const double slope = cubic_slope(l1, l2, z);
            if (slope == 0.0) {
                break;
            }
            const double step = cubic_value(l1, l2, l3, z) / slope;
            if (!std::isfinite(step)) {
                break;
            }
            z -= step;
        }
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

std::vector<double> omega_candidates(const CharCoeffs& cc) {
    std::vector<double> out;
    for (double z : real_cubic_roots(cc.l1, cc.l2, cc.l3)) {
        if (z > 0.0) {
            out.push_back(std::sqrt(z));
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool is_simple_frequency(const CharCoeffs& cc, double omega) {
    return std::abs(cubic_slope(cc.l1, cc.l2, omega * omega)) > 1e-10;
}

std::vector<double> critical_delays(double omega, const CharCoeffs& cc, int k_max) {
    if (!(omega > 0.0)) {
        throw PreconditionError("critical_delays: omega must be positive");
    }
    const cplx G = delay_ratio(cc, cplx(0.0, omega));
    const double defect = std::abs(std::abs(G) - 1.0);
    if (!(defect <= 1e-8)) {
        std::ostringstream msg;
        msg << "critical_delays: |G(i omega)| - 1 = " << defect << " at omega = " << omega
            << "; omega is not a crossing frequency";
        throw PreconditionError(msg.str());
    }
    double arg = std::arg(G);
    if (arg < 0.0) {
        arg += kTwoPi;
    }
    if (arg >= kTwoPi) {
        arg -= kTwoPi;
    }
    std::vector<double> taus;
    for (int k = 0; k <= k_max; ++k) {
        const double tau = (arg + kTwoPi * k) / (2.0 * omega);
        if (tau > 0.0) {
            taus.push_back(tau);
        }
    }
    return taus;
}

std::complex<double> transversality(double omega, double tau, const CharCoeffs& cc) {
    const cplx lambda(0.0, omega);
    const cplx e = std::exp(-2.0 * lambda * tau);
    const cplx q = cc.g * lambda + cc.h;
    const cplx denom = 3.0 * lambda * lambda + 2.0 * cc.b * lambda + cc.c + (cc.g - 2.0 * tau * q) * e;
    if (std::abs(denom) < 1e-12) {
        throw NumericalError("transversality: characteristic root is not simple (degenerate Hopf point)");
    }
    return 2.0 * lambda * q * e / denom;
}

PrintedTransversality transversality_printed(double omega, double tau, const CharCoeffs& cc) {
    const double w = omega;
    const double s = std::sin(2.0 * w * tau);
    const double c = std::cos(2.0 * w * tau);
    PrintedTransversality out;
    out.L1 = (-cc.c - 3.0 * w * w) * c - 2.0 * cc.b * w * s - 2.0 * cc.g * tau + cc.h;
    out.L2 = (-cc.c - 3.0 * w * w) * s + 2.0 * cc.b * w * c - 2.0 * cc.h * w * tau;
    const double den = out.L1 * out.L1 + out.L2 * out.L2;
    out.value = cplx(2.0 * (w * cc.g * out.L2 + w * w * cc.h * out.L1) / den,
                     2.0 * (w * cc.g * out.L1 + w * w * cc.h * out.L2) / den);
    return out;
}

std::vector<DelayCandidate> delay_candidates(const CharCoeffs& cc, int k_max) {
    std::vector<DelayCandidate> out;
    for (double omega : omega_candidates(cc)) {
        if (!is_simple_frequency(cc, omega)) {
            continue;
        }
        const cplx lambda(0.0, omega);
        const double defect = std::abs(std::abs(delay_ratio(cc, lambda)) - 1.0);
        const auto taus = critical_delays(omega, cc, k_max);
        double arg = std::arg(delay_ratio(cc, lambda));
        if (arg < 0.0) {
            arg += kTwoPi;
        }
        for (double tau : taus) {
            DelayCandidate dc;
            dc.omega = omega;
            dc.tau = tau;
            dc.branch = static_cast<int>(std::lround((2.0 * omega * tau - arg) / kTwoPi));
            dc.modulus_defect = defect;
            dc.residual = std::abs(char_function(cc, lambda, tau));
            dc.dlambda_dtau = transversality(omega, tau, cc);
            out.push_back(dc);
        }
    }
    std::sort(out.begin(), out.end(), [](const DelayCandidate& l, const DelayCandidate& r) {
        return l.tau < r.tau || (l.tau == r.tau && l.omega < r.omega);
    });
    return out;
}

std::optional<HopfPoint> find_hopf_point(const CharCoeffs& cc, int k_max) {
    const auto candidates = delay_candidates(cc, k_max);
    if (candidates.empty()) {
        return std::nullopt;
    }
    const DelayCandidate& best = candidates.front();
    HopfPoint hp;
    hp.omega_c = best.omega;
    hp.tau_c = best.tau;
    hp.branch = best.branch;
    hp.dlambda_dtau = best.dlambda_dtau;
    const auto printed = transversality_printed(best.omega, best.tau, cc);
    hp.L1 = printed.L1;
    hp.L2 = printed.L2;
    hp.dlambda_dtau_printed = printed.value;
    return hp;
}

StabilityVerdict classify_stability(const ModelParams& p, const Equilibrium& eq, double tau) {
    if (!(tau >= 0.0)) {
        throw DomainError("classify_stability: tau must be nonnegative");
    }
    const CharCoeffs cc = char_coeffs(p, eq);
    int unstable = unstable_root_count_undelayed(cc);
    for (double omega : omega_candidates(cc)) {
        if (!is_simple_frequency(cc, omega)) {
            continue;
        }
        const int k_needed = static_cast<int>(std::ceil(2.0 * omega * tau / kTwoPi)) + 1;
        for (double tk : critical_delays(omega, cc, std::max(8, k_needed))) {
            if (std::abs(tau - tk) < 1e-9) {
                return StabilityVerdict::at_bifurcation;
            }
            if (tk < tau) {
                unstable += transversality(omega, tk, cc).real() > 0.0 ? 2 : -2;
            }
        }
    }
    return unstable > 0 ? StabilityVerdict::unstable : StabilityVerdict::stable;
}

} // namespace p53hopf
