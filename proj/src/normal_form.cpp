#include "p53hopf/normal_form.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "p53hopf/errors.hpp"

namespace p53hopf {

namespace {

constexpr Complex kI{0.0, 1.0};

/// int_{-tau}^0 e^{s theta} dtheta
Complex exp_integral(Complex s, double tau) {
    const Complex st = s * tau;
    if (std::abs(st) < 1e-6) {
        // tau (1 - st/2 + st^2/6 - st^3/24)
        return tau * (1.0 - st / 2.0 + st * st / 6.0 - st * st * st / 24.0);
    }
    return (1.0 - std::exp(-st)) / s;
}

Eigen::Matrix4cd delayed_matrix(const LinearPair& lp, Complex lambda, double tau) {
    return lp.A.cast<Complex>() + lp.B.cast<Complex>() * std::exp(-lambda * tau) -
           lambda * Eigen::Matrix4cd::Identity();
}

double condition_number(const Eigen::Matrix4cd& M) {
    Eigen::JacobiSVD<Eigen::Matrix4cd> svd(M);
    const auto& s = svd.singularValues();
    if (s(3) == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return s(0) / s(3);
}

std::string verdict(double value, const char* positive, const char* negative) {
    if (value > 0.0) {
        return positive;
    }
    if (value < 0.0) {
        return negative;
    }
    return "undetermined";
}

} // namespace

Eigen::Vector4cd right_eigenvector(const ModelParams& p, const Equilibrium& eq, double omega, double tau) {
    if (eq.rho1 == 0.0) {
        throw NumericalError("right_eigenvector: rho1 = 0, eigenvector undefined");
    }
    if (p.a12 * eq.y10 == 0.0) {
        throw NumericalError("right_eigenvector: a12 y10 = 0, eigenvector undefined");
    }
    const Complex l1 = kI * omega;
    const double alpha1 = p.a1 + p.a12 * eq.y20;
    Eigen::Vector4cd v;
    v(0) = 0.0;
    v(1) = (l1 + p.b2) / eq.rho1 * std::exp(l1 * tau);
    v(2) = 1.0;
    v(3) = -(l1 + p.b2) * (l1 + alpha1) / (eq.rho1 * p.a12 * eq.y10) * std::exp(2.0 * l1 * tau);
    return v;
}

Complex bilinear_pairing(const Eigen::RowVector4cd& psi, Complex psi_rate, const Eigen::Vector4cd& phi,
                         Complex phi_rate, const Eigen::Matrix4d& B, double tau) {
    const Complex direct = psi * phi;
    const Complex coupled = psi * B.cast<Complex>() * phi;
    return direct + std::exp(psi_rate * tau) * coupled * exp_integral(psi_rate + phi_rate, tau);
}

LeftEigen left_eigenvector(const ModelParams& p, const Equilibrium& eq, double omega, double tau,
                           const Eigen::Vector4cd& v) {
    const Complex l1 = kI * omega;
    const double alpha2 = p.a2 + p.a21 * eq.y10;
    const Complex e1 = std::exp(-l1 * tau);
    const Complex w4 = -p.a12 * eq.y10 * e1 * (p.b1 + l1) / (alpha2 + l1);
    Eigen::RowVector4cd w;
    w(0) = 1.0;
    w(1) = p.b1 + l1;
    w(2) = w4 / (p.b2 + l1);
    w(3) = w4;

    const LinearPair lp = linearize(p, eq);
    const Complex eta = bilinear_pairing(w, -l1, v, l1, lp.B, tau);
    if (std::abs(eta) < 1e-14 * w.norm() * v.norm()) {
        throw NumericalError("left_eigenvector: eta vanishes, adjoint pairing is defective");
    }
    return {w / eta, eta};
}

Eigenpair make_eigenpair(const ModelParams& p, const Equilibrium& eq, double omega, double tau) {
    Eigenpair ep;
    ep.lambda1 = kI * omega;
    ep.lambda2 = -kI * omega;
    ep.v = right_eigenvector(p, eq, omega, tau);
    const LeftEigen left = left_eigenvector(p, eq, omega, tau, ep.v);
    ep.w = left.w;
    ep.eta = left.eta;
    return ep;
}

Eigen::Vector4cd null_vector(const Eigen::Matrix4cd& M) {
    Eigen::Vector4cd best = Eigen::Vector4cd::Zero();
    double best_residual = std::numeric_limits<double>::infinity();
    for (int pin = 0; pin < 4; ++pin) {
        for (int drop = 0; drop < 4; ++drop) {
            Eigen::Matrix3cd sub;
            Eigen::Vector3cd rhs;
            int r = 0;
            for (int i = 0; i < 4; ++i) {
                if (i == drop) {
                    continue;
                }
                int c = 0;
                for (int j = 0; j < 4; ++j) {
                    if (j == pin) {
                        continue;
                    }
                    sub(r, c++) = M(i, j);
                }
                rhs(r++) = -M(i, pin);
            }
            Eigen::PartialPivLU<Eigen::Matrix3cd> lu(sub);
            if (std::abs(lu.determinant()) == 0.0) {
                continue;
            }
            const Eigen::Vector3cd x = lu.solve(rhs);
            Eigen::Vector4cd cand;
            int c = 0;
            for (int j = 0; j < 4; ++j) {
                cand(j) = (j == pin) ? Complex(1.0) : x(c++);
            }
            if (!cand.allFinite()) {
                continue;
            }
            const double res = (M * cand).norm() / cand.norm();
            if (res < best_residual) {
                best_residual = res;
                best = cand;
            }
        }
    }
    return best;
}

QuadraticTerms g_quadratic(const ModelParams& p, const Equilibrium& eq, const Eigenpair& ep, double tau,
                           const FormulaOptions& opts) {
    const Complex l1 = ep.lambda1;
    const Complex l2 = ep.lambda2;
    const Complex e1 = std::exp(-l1 * tau);
    const Complex e2 = std::exp(-l2 * tau);
    const Complex v2 = ep.v(1);
    const Complex v4 = ep.v(3);
    const Complex cv2 = std::conj(v2);
    const Complex cv4 = std::conj(v4);

    QuadraticTerms q;
    q.F20 << 0.0, -2.0 * p.a12 * v2 * v4 * e1, eq.rho2 * v2 * v2 * e1 * e1, -2.0 * p.a21 * v2 * v4 * e1;
    const Complex f4_11 = opts.literal_f4_11 ? -p.a21 * v2 * cv4 * e1 + v4 * cv2 * e2
                                             : -p.a21 * (v2 * cv4 * e1 + v4 * cv2 * e2);
    q.F11 << 0.0, -p.a12 * (v2 * cv4 * e2 + cv2 * v4 * e1), eq.rho2 * v2 * cv2, f4_11;
    const double f4_02_rate = opts.literal_f4_02 ? p.a12 : p.a21;
    q.F02 << 0.0, -2.0 * p.a12 * cv2 * cv4 * e2, eq.rho2 * cv2 * cv2 * e2 * e2, -2.0 * f4_02_rate * cv2 * cv4 * e2;

    q.g20 = ep.w * q.F20;
    q.g11 = ep.w * q.F11;
    q.g02 = ep.w * q.F02;
    return q;
}

EVectors solve_E_vectors(const ModelParams& p, const Equilibrium& eq, const Eigenpair& ep, double tau,
                         const Eigen::Vector4cd& F20, const Eigen::Vector4cd& F11) {
    const LinearPair lp = linearize(p, eq);
    // A + e^{-2 l1 tau} B - 2 l1 I
    const Eigen::Matrix4cd M2 = delayed_matrix(lp, 2.0 * ep.lambda1, tau);
    const Eigen::Matrix4cd M0 = (lp.A + lp.B).cast<Complex>();

    for (const auto* M : {&M2, &M0}) {
        const double cond = condition_number(*M);
        if (!(cond <= 1e12)) {
            std::ostringstream msg;
            msg << "solve_E_vectors: near-singular system (condition " << cond << ")";
            throw NumericalError(msg.str());
        }
    }

    EVectors ev;
    ev.E2 = -M2.fullPivLu().solve(F20);
    ev.E1 = -M0.fullPivLu().solve(F11);
    ev.residual2 = (M2 * ev.E2 + F20).norm();
    ev.residual1 = (M0 * ev.E1 + F11).norm();
    const double tiny = std::numeric_limits<double>::min();
    if (ev.residual2 > 1e-10 * F20.norm() + tiny || ev.residual1 > 1e-10 * F11.norm() + tiny) {
        throw NumericalError("solve_E_vectors: residual above 1e-10 ||F||");
    }
    return ev;
}

CubicTerms g_cubic(const ModelParams& p, const Equilibrium& eq, const Eigenpair& ep, double tau,
                   const QuadraticTerms& quad, const EVectors& ev, const FormulaOptions& opts) {
    const Complex l1 = ep.lambda1;
    const Complex l2 = ep.lambda2;
    const Complex e1 = std::exp(-l1 * tau);
    const Complex e2 = std::exp(-l2 * tau);
    const Complex v2 = ep.v(1);
    const Complex v4 = ep.v(3);
    const Complex cv2 = std::conj(v2);
    const Complex cv4 = std::conj(v4);
    const Complex g20 = quad.g20;
    const Complex g11 = quad.g11;
    const Complex cg02 = std::conj(quad.g02);
    const Complex cg11 = std::conj(g11);
    const Complex cg_w4 = opts.literal_w20_conj ? std::conj(g20) : cg02;
    const Complex E2_2 = ev.E2(1);
    const Complex E2_4 = ev.E2(3);
    const Complex E1_2 = ev.E1(1);
    const Complex E1_4 = ev.E1(3);

    CubicTerms c;
    c.w20_2_delayed = -g20 / l1 * v2 * e1 - cg02 / (3.0 * l1) * cv2 * e2 + E2_2 * e1 * e1;
    c.w11_2_delayed = g11 / l1 * v2 * e1 - cg11 / l1 * cv2 * e2 + E1_2;
    c.w20_4_delayed = -g20 / l1 * v4 * e1 - cg_w4 / (3.0 * l1) * cv4 * e2 + E2_4 * e1 * e1;
    c.w11_4_delayed = g11 / l1 * v4 * e1 - cg11 / l1 * cv4 * e2 + E1_4;
    c.w20_2_now = -g20 / l1 * v2 - cg02 / (3.0 * l1) * cv2 + E2_2;
    c.w11_2_now = g11 / l1 * v2 - cg11 / l1 * cv2 + E1_2;
    c.w20_4_now = -g20 / l1 * v4 - cg_w4 / (3.0 * l1) * cv4 + E2_4;
    c.w11_4_now = g11 / l1 * v4 - cg11 / l1 * cv4 + E1_4;

    // F2 = -a12 u2(t) u4(t - tau): the u2 factor is instantaneous.
    const Complex w11_2_for_f2 = opts.literal_f21_args ? c.w11_2_delayed : c.w11_2_now;
    c.F2_21 = -p.a12 * (2.0 * v2 * c.w11_4_delayed + cv2 * c.w20_4_delayed + cv4 * c.w20_2_now * e2 +
                        2.0 * v4 * w11_2_for_f2 * e1);
    c.F3_21 = eq.rho2 * (2.0 * v2 * c.w11_2_delayed * e1 + cv2 * c.w20_2_delayed * e2) + eq.rho3 * v2 * v2 * cv2 * e1;
    // F4 = -a21 u2(t - tau) u4(t): the u4 factor is instantaneous.
    const Complex w11_4_for_f4 = opts.literal_f21_args ? c.w11_4_delayed : c.w11_4_now;
    c.F4_21 = -p.a21 * (2.0 * v2 * w11_4_for_f4 * e1 + cv2 * c.w20_4_now * e2 + cv4 * c.w20_2_delayed +
                        2.0 * v4 * c.w11_2_delayed);
    c.g21 = c.F2_21 * ep.w(1) + c.F3_21 * ep.w(2) + c.F4_21 * ep.w(3);
    return c;
}

NormalForm hopf_quantities(Complex g20, Complex g11, Complex g02, Complex g21, Complex dlambda_dtau,
                           double omega) {
    NormalForm nf;
    nf.g20 = g20;
    nf.g11 = g11;
    nf.g02 = g02;
    nf.g21 = g21;
    nf.C1 = kI / (2.0 * omega) * (g20 * g11 - 2.0 * std::norm(g11) - std::norm(g02) / 3.0) + g21 / 2.0;
    nf.beta2 = 2.0 * nf.C1.real();
    nf.degenerate = std::abs(nf.C1.real()) < 1e-14;
    if (dlambda_dtau.real() == 0.0) {
        throw PreconditionError("hopf_quantities: transversality fails, Re(dlambda/dtau) = 0");
    }
    nf.mu2 = -nf.C1.real() / dlambda_dtau.real();
    nf.T2 = -(nf.C1.imag() + nf.mu2 * dlambda_dtau.imag()) / omega;
    if (nf.degenerate) {
        nf.direction = nf.orbit_stability = nf.period_trend = "undetermined";
    } else {
        nf.direction = verdict(nf.mu2, "supercritical", "subcritical");
        nf.orbit_stability = verdict(-nf.beta2, "orbitally stable", "orbitally unstable");
        nf.period_trend = verdict(nf.T2, "period increasing", "period decreasing");
    }
    return nf;
}

Eigen::Vector4cd center_manifold_w20(const NormalForm& nf, const Eigenpair& ep, double theta) {
    const Complex l1 = ep.lambda1;
    return (-nf.g20 / l1 * std::exp(l1 * theta)) * ep.v -
           (std::conj(nf.g02) / (3.0 * l1) * std::exp(ep.lambda2 * theta)) * ep.v.conjugate() +
           std::exp(2.0 * l1 * theta) * nf.E2;
}

Eigen::Vector4cd center_manifold_w11(const NormalForm& nf, const Eigenpair& ep, double theta) {
    const Complex l1 = ep.lambda1;
    return (nf.g11 / l1 * std::exp(l1 * theta)) * ep.v -
           (std::conj(nf.g11) / l1 * std::exp(ep.lambda2 * theta)) * ep.v.conjugate() + nf.E1;
}

NormalFormAnalysis analyze_normal_form(const ModelParams& p, const Equilibrium& eq, const HopfPoint& hopf,
                                       const FormulaOptions& opts) {
    const double omega = hopf.omega_c;
    const double tau = hopf.tau_c;
    NormalFormAnalysis out;
    out.eigen = make_eigenpair(p, eq, omega, tau);

    const LinearPair lp = linearize(p, eq);
    const Eigen::Matrix4cd M = delayed_matrix(lp, out.eigen.lambda1, tau);
    out.right_residual = (M * out.eigen.v).norm();
    out.left_residual = (out.eigen.w * M).norm();
    if (out.right_residual > 1e-9 || out.left_residual > 1e-9) {
        std::ostringstream msg;
        msg << "analyze_normal_form: eigen-residuals " << out.right_residual << ", " << out.left_residual
            << " exceed 1e-9";
        throw NumericalError(msg.str());
    }
    // The printed v must span the same line as the deflated null vector.
    const Eigen::Vector4cd nv = null_vector(M);
    const double collinear = std::abs(nv.dot(out.eigen.v)) / (nv.norm() * out.eigen.v.norm());
    if (std::abs(collinear - 1.0) > 1e-8) {
        throw NumericalError("analyze_normal_form: eigenvector disagrees with the numerical null space");
    }

    out.quadratic = g_quadratic(p, eq, out.eigen, tau, opts);
    out.evectors = solve_E_vectors(p, eq, out.eigen, tau, out.quadratic.F20, out.quadratic.F11);
    out.cubic = g_cubic(p, eq, out.eigen, tau, out.quadratic, out.evectors, opts);
    out.form = hopf_quantities(out.quadratic.g20, out.quadratic.g11, out.quadratic.g02, out.cubic.g21,
                               hopf.dlambda_dtau, omega);
    out.form.E1 = out.evectors.E1;
    out.form.E2 = out.evectors.E2;
    return out;
}

} // namespace p53hopf
