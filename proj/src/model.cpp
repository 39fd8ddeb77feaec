#include "p53hopf/model.hpp"

#include <cmath>
#include <string>

#include "p53hopf/errors.hpp"

namespace p53hopf {

namespace {

void check_rate(const char* name, double v, bool allow_zero) {
    const bool ok = std::isfinite(v) && v <= 1.0 && (allow_zero ? v >= 0.0 : v > 0.0);
    if (!ok) {
        throw DomainError(std::string("parameter ") + name + " = " + std::to_string(v) +
                          (allow_zero ? " must lie in [0, 1]" : " must lie in (0, 1]"));
    }
}

} // namespace

void validate(const ModelParams& p) {
    check_rate("a1", p.a1, false);
    check_rate("a2", p.a2, false);
    check_rate("b1", p.b1, false);
    check_rate("b2", p.b2, false);
    check_rate("a12", p.a12, true);
    check_rate("a21", p.a21, true);
    if (!(std::isfinite(p.a) && p.a > 0.0)) {
        throw DomainError("Hill constant a must be positive");
    }
    if (p.n < 1) {
        throw DomainError("Hill exponent n must be a positive integer");
    }
}

StateVec& StateVec::operator+=(const StateVec& o) {
    x1 += o.x1;
    y1 += o.y1;
    x2 += o.x2;
    y2 += o.y2;
    return *this;
}

StateVec& StateVec::operator-=(const StateVec& o) {
    x1 -= o.x1;
    y1 -= o.y1;
    x2 -= o.x2;
    y2 -= o.y2;
    return *this;
}

StateVec& StateVec::operator*=(double s) {
    x1 *= s;
    y1 *= s;
    x2 *= s;
    y2 *= s;
    return *this;
}

double norm(const StateVec& v) {
    return std::sqrt(v.x1 * v.x1 + v.y1 * v.y1 + v.x2 * v.x2 + v.y2 * v.y2);
}

bool is_finite(const StateVec& v) {
    return std::isfinite(v.x1) && std::isfinite(v.y1) && std::isfinite(v.x2) && std::isfinite(v.y2);
}

double hill_eval(double x, const ModelParams& p) {
    if (!(x >= 0.0)) {
        throw DomainError("hill_eval: argument must be nonnegative, got " + std::to_string(x));
    }
    if (x == 0.0) {
        return 0.0;
    }
    // a x^-n may overflow to +inf for tiny x; 1/(1+inf) = 0 is the right limit.
    const double u = p.a * std::pow(x, -static_cast<double>(p.n));
    return 1.0 / (1.0 + u);
}

HillDerivatives hill_derivs(double x, const ModelParams& p) {
    const double n = static_cast<double>(p.n);
    if (x < 0.0 || std::isnan(x)) {
        throw DomainError("hill_derivs: argument must be positive, got " + std::to_string(x));
    }
    if (x == 0.0) {
        if (p.n < 3) {
            throw DomainError("hill_derivs: x = 0 is singular for n < 3");
        }
        return {0.0, 0.0, p.n == 3 ? 6.0 / p.a : 0.0};
    }
    const double u = p.a * std::pow(x, -n);
    double f = 0.0;
    double q = 1.0;
    if (std::isfinite(u)) {
        f = 1.0 / (1.0 + u);
        q = u / (1.0 + u);
    }
    const double d1 = n * f * q / x;
    const double shape = n * (q - f); // n (1 - 2f)
    const double d2 = d1 * (shape - 1.0) / x;
    const double d3 = (d2 * (shape - 2.0) - 2.0 * n * d1 * d1) / x;
    return {d1, d2, d3};
}

StateVec rhs(const StateVec& s, const StateVec& d, const ModelParams& p) {
    return {
        1.0 - p.b1 * s.x1,
        s.x1 - (p.a1 + p.a12 * d.y2) * s.y1,
        hill_eval(d.y1, p) - p.b2 * s.x2,
        s.x2 - (p.a2 + p.a21 * d.y1) * s.y2,
    };
}

} // namespace p53hopf
