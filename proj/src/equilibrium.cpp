#include "p53hopf/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "p53hopf/errors.hpp"

namespace p53hopf {

namespace {

/// Neumaier-compensated accumulator.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    [[nodiscard]] double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

double max_abs(std::span<const double> c) {
    double m = 0.0;
    for (double v : c) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

std::span<const double> trimmed(std::span<const double> c) {
    std::size_t len = c.size();
    while (len > 0 && c[len - 1] == 0.0) {
        --len;
    }
    return c.first(len);
}

constexpr int kScanPoints = 20000;
constexpr int kMaxIterations = 400;

} // namespace

std::vector<double> equilibrium_poly_coeffs(const ModelParams& p) {
    const auto n = static_cast<std::size_t>(p.n);
    std::vector<double> c(n + 3, 0.0);
    c[n + 2] += p.a1 * p.b1 * p.b2 * p.a21;
    c[n + 1] += p.b1 * p.a12 - p.b2 * p.a21 + p.a1 * p.b1 * p.a2 * p.b2;
    c[n] += -p.a2 * p.b2;
    c[2] += p.a1 * p.b1 * p.b2 * p.a * p.a21;
    c[1] += p.b1 * p.a * p.a2 * p.a1 * p.b2 - p.b2 * p.a * p.a21;
    c[0] += -p.a * p.a2 * p.b2;
    return c;
}

double poly_eval_scaled(std::span<const double> c, double x) {
    CompensatedSum sum;
    if (std::abs(x) <= 1.0) {
        double power = 1.0;
        for (double ci : c) {
            sum.add(ci * power);
            power *= x;
        }
    } else {
        const double y = 1.0 / x;
        double power = 1.0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) {
            sum.add(*it * power);
            power *= y;
        }
    }
    return sum.value();
}

double poly_deriv_scaled(std::span<const double> c, double x) {
    if (c.size() < 2) {
        return 0.0;
    }
    CompensatedSum sum;
    const std::size_t deg = c.size() - 1;
    if (std::abs(x) <= 1.0) {
        double power = 1.0;
        for (std::size_t i = 1; i <= deg; ++i) {
            sum.add(static_cast<double>(i) * c[i] * power);
            power *= x;
        }
        return sum.value();
    }
    // d/dx k(x) / x^deg scaling: sum_i i c_i x^{i-1-deg} = y * sum_i i c_i y^{deg-i}
    const double y = 1.0 / x;
    double power = 1.0;
    for (std::size_t i = deg; i >= 1; --i) {
        sum.add(static_cast<double>(i) * c[i] * power);
        power *= y;
    }
    return y * sum.value();
}

std::vector<double> find_positive_roots(std::span<const double> coeffs) {
    const auto c = trimmed(coeffs);
    if (c.size() < 2) {
        return {};
    }
    if (!(c[0] < 0.0)) {
        throw PreconditionError("find_positive_roots: constant term must be negative");
    }
    const double lead = std::abs(c.back());
    double tail_sum = 0.0;
    double tail_max = 0.0;
    for (std::size_t i = 0; i + 1 < c.size(); ++i) {
        tail_sum += std::abs(c[i]);
    }
    for (std::size_t i = 1; i < c.size(); ++i) {
        tail_max = std::max(tail_max, std::abs(c[i]));
    }
    const double upper = 1.0 + tail_sum / lead;
    const double lower = std::abs(c[0]) / (std::abs(c[0]) + tail_max);

    std::vector<double> roots;
    const double ratio = std::pow(upper / lower, 1.0 / kScanPoints);
    double x_prev = lower;
    double k_prev = poly_eval_scaled(c, x_prev);
    for (int i = 1; i <= kScanPoints; ++i) {
        const double x_next = (i == kScanPoints) ? upper : lower * std::pow(ratio, i);
        const double k_next = poly_eval_scaled(c, x_next);
        if (k_next == 0.0) {
            roots.push_back(x_next);
        } else if ((k_prev < 0.0) != (k_next < 0.0) && k_prev != 0.0) {
            double lo = x_prev;
            double hi = x_next;
            const bool rising = k_prev < 0.0;
            int iter = 0;
            while (hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi) {
                if (++iter > kMaxIterations) {
                    std::ostringstream msg;
                    msg << "find_positive_roots: bisection did not converge in [" << lo << ", " << hi << "]";
                    throw NumericalError(msg.str());
                }
                const double mid = 0.5 * (lo + hi);
                const double km = poly_eval_scaled(c, mid);
                if (km == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((km < 0.0) == rising) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            double root = 0.5 * (lo + hi);
            // Newton polish, kept inside the final bracket.
            for (int k = 0; k < 3; ++k) {
                const double d = poly_deriv_scaled(c, root);
                if (d == 0.0) {
                    break;
                }
                const double cand = root - poly_eval_scaled(c, root) / d;
                if (!(cand >= lo && cand <= hi)) {
                    break;
                }
                root = cand;
            }
            roots.push_back(root);
        }
        x_prev = x_next;
        k_prev = k_next;
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());

    const double tol = 1e-12 * max_abs(c);
    for (double r : roots) {
        if (std::abs(poly_eval_scaled(c, r)) > tol) {
            std::ostringstream msg;
            msg << "find_positive_roots: root " << r << " has residual " << poly_eval_scaled(c, r);
            throw NumericalError(msg.str());
        }
    }
    return roots;
}

Equilibrium build_equilibrium(const ModelParams& p, double y10) {
    if (!(y10 > 0.0) || !std::isfinite(y10)) {
        throw DomainError("build_equilibrium: y10 must be positive");
    }
    const auto coeffs = equilibrium_poly_coeffs(p);
    const double residual = poly_eval_scaled(coeffs, y10);
    if (std::abs(residual) > 1e-10 * max_abs(coeffs)) {
        std::ostringstream msg;
        msg << "build_equilibrium: y10 = " << y10 << " is not a root (scaled residual " << residual << ")";
        throw DomainError(msg.str());
    }
    const double f = hill_eval(y10, p);
    const auto rho = hill_derivs(y10, p);
    Equilibrium eq;
    eq.x10 = 1.0 / p.b1;
    eq.y10 = y10;
    eq.x20 = f / p.b2;
    eq.y20 = f / (p.b2 * (p.a2 + p.a21 * y10));
    eq.rho1 = rho.rho1;
    eq.rho2 = rho.rho2;
    eq.rho3 = rho.rho3;
    return eq;
}

std::vector<Equilibrium> compute_equilibria(const ModelParams& p) {
    validate(p);
    const auto coeffs = equilibrium_poly_coeffs(p);
    std::vector<Equilibrium> out;
    for (double y10 : find_positive_roots(coeffs)) {
        out.push_back(build_equilibrium(p, y10));
    }
    return out;
}

} // namespace p53hopf
