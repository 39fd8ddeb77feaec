#include "p53hopf/simulation.hpp"

#include <cmath>
#include <sstream>

#include "p53hopf/errors.hpp"

namespace p53hopf {

namespace {

StateVec hermite(const StateVec& x0, const StateVec& d0, const StateVec& x1, const StateVec& d1, double h,
                 double s) {
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    const double h10 = s3 - 2.0 * s2 + s;
    const double h01 = -2.0 * s3 + 3.0 * s2;
    const double h11 = s3 - s2;
    return h00 * x0 + (h10 * h) * d0 + h01 * x1 + (h11 * h) * d1;
}

bool has_negative(const StateVec& v) {
    return v.x1 < 0.0 || v.y1 < 0.0 || v.x2 < 0.0 || v.y2 < 0.0;
}

/// Past solution nodes, with history nodes addressed below zero. Keeps only
/// the m + 2 most recent solution nodes.
class NodeStore {
public:
    NodeStore(const History& history, std::size_t m) : history_(history), m_(m), ring_(m + 2) {}

    void push(std::size_t index, const StateVec& x, const StateVec& dx) { ring_[index % ring_.size()] = {x, dx}; }

    /// Delayed state on segment [i - m, i - m + 1] (solution node indices)
    /// at fraction s of the segment.
    [[nodiscard]] StateVec delayed(std::size_t i, double s, double h) const {
        // Global node g = i counts from theta = -tau.
        const std::size_t g = i;
        if (g + 1 <= m_) {
            return hermite(history_.values[g], history_.derivatives[g], history_.values[g + 1],
                           history_.derivatives[g + 1], h, s);
        }
        const Node& a = ring_[(g - m_) % ring_.size()];
        if (s == 0.0) {
            return a.x;
        }
        const Node& b = ring_[(g - m_ + 1) % ring_.size()];
        return hermite(a.x, a.dx, b.x, b.dx, h, s);
    }

    /// Value at the left end of segment i - m (exact node lookup).
    [[nodiscard]] StateVec node_value(std::size_t i) const {
        if (i <= m_) {
            return history_.values[i];
        }
        return ring_[(i - m_) % ring_.size()].x;
    }

private:
    struct Node {
        StateVec x;
        StateVec dx;
    };
    const History& history_;
    std::size_t m_;
    std::vector<Node> ring_;
};

} // namespace

std::size_t steps_per_delay(double tau, double step) {
    if (!(tau > 0.0) || !(step > 0.0)) {
        throw DomainError("delay and step must be positive");
    }
    if (step > tau * (1.0 + 1e-12)) {
        throw DomainError("step must not exceed the delay");
    }
    const double ratio = tau / step;
    const double m = std::round(ratio);
    if (std::abs(ratio - m) > 1e-9 * ratio) {
        std::ostringstream msg;
        msg << "step " << step << " does not divide the delay " << tau;
        throw DomainError(msg.str());
    }
    return static_cast<std::size_t>(m);
}

History constant_history(double tau, double step, const StateVec& value) {
    const std::size_t m = steps_per_delay(tau, step);
    History h;
    h.tau = tau;
    h.step = step;
    h.values.assign(m + 1, value);
    h.derivatives.assign(m + 1, StateVec{});
    return h;
}

History sampled_history(double tau, double step, const std::function<StateVec(double)>& phi,
                        const std::function<StateVec(double)>& dphi) {
    const std::size_t m = steps_per_delay(tau, step);
    History h;
    h.tau = tau;
    h.step = step;
    h.values.reserve(m + 1);
    h.derivatives.reserve(m + 1);
    for (std::size_t j = 0; j <= m; ++j) {
        const double theta = (j == m) ? 0.0 : -tau + static_cast<double>(j) * step;
        h.values.push_back(phi(theta));
        h.derivatives.push_back(dphi(theta));
    }
    return h;
}

History perturbed_equilibrium_history(const Equilibrium& eq, double tau, double step,
                                      double relative_perturbation) {
    return constant_history(tau, step, (1.0 + relative_perturbation) * eq.state());
}

Trajectory integrate(const ModelParams& p, double tau, const History& history, double t_end, double step,
                     const IntegrateOptions& opts) {
    const std::size_t m = steps_per_delay(tau, step);
    if (history.steps_per_delay() != m || history.derivatives.size() != history.values.size() ||
        std::abs(history.tau - tau) > 1e-12 * tau || std::abs(history.step - step) > 1e-12 * step) {
        throw DomainError("integrate: history grid does not match the delay and step");
    }
    if (!(t_end > 0.0)) {
        throw DomainError("integrate: t_end must be positive");
    }
    const double full_steps = std::floor(t_end / step * (1.0 + 1e-14));
    if (full_steps > static_cast<double>(opts.max_steps)) {
        throw NumericalError("integrate: step budget exceeded");
    }
    const auto n_full = static_cast<std::size_t>(full_steps);
    const double tail = t_end - static_cast<double>(n_full) * step;
    const bool has_tail = tail > 1e-12 * step;
    const std::size_t stride = std::max<std::size_t>(1, opts.output_stride);

    Trajectory tr;
    tr.meta.params = p;
    tr.meta.tau = tau;
    tr.meta.step = step;
    tr.meta.equilibrium = opts.equilibrium;

    NodeStore store(history, m);
    StateVec x = history.values.back();

    auto record = [&](double t, const StateVec& state) {
        tr.t.push_back(t);
        tr.x.push_back(state);
        if (has_negative(state)) {
            ++tr.meta.negative_samples;
        }
    };

    auto f = [&](const StateVec& state, const StateVec& lagged, double t) {
        try {
            return rhs(state, lagged, p);
        } catch (const DomainError& e) {
            std::ostringstream msg;
            msg << "integrate: right-hand side undefined at t = " << t << ": " << e.what();
            throw NumericalError(msg.str());
        }
    };

    // x(t_i - tau) is node i of the combined (history, solution) grid.
    auto step_rk4 = [&](std::size_t i, double t, double h) {
        const double frac = h / step;
        const StateVec k1 = f(x, store.node_value(i), t);
        store.push(i, x, k1);
        const StateVec dmid = store.delayed(i, 0.5 * frac, step);
        const StateVec d1 = store.delayed(i, frac, step);
        const StateVec k2 = f(x + (0.5 * h) * k1, dmid, t);
        const StateVec k3 = f(x + (0.5 * h) * k2, dmid, t);
        const StateVec k4 = f(x + h * k3, d1, t);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!is_finite(x) || norm(x) > opts.divergence_threshold) {
            std::ostringstream msg;
            msg << "integrate: solution diverged at t = " << t + h;
            throw NumericalError(msg.str());
        }
        if (!tr.meta.first_negative_t && has_negative(x)) {
            tr.meta.first_negative_t = t + h;
        }
    };

    record(0.0, x);
    if (has_negative(x)) {
        tr.meta.first_negative_t = 0.0;
    }
    for (std::size_t i = 0; i < n_full; ++i) {
        const double t = static_cast<double>(i) * step;
        step_rk4(i, t, step);
        const bool last = (i + 1 == n_full) && !has_tail;
        if ((i + 1) % stride == 0 || last) {
            record(static_cast<double>(i + 1) * step, x);
        }
    }
    if (has_tail) {
        step_rk4(n_full, static_cast<double>(n_full) * step, tail);
        record(t_end, x);
    }
    return tr;
}

ComplexPath integrate_reduced(const NormalForm& nf, const Eigenpair& ep, Complex dlambda_dtau,
                              double delay_offset, Complex z0, double t_end, double step) {
    if (!(step > 0.0) || !(t_end > 0.0)) {
        throw DomainError("integrate_reduced: step and t_end must be positive");
    }
    const Complex rate = ep.lambda1 + delay_offset * dlambda_dtau;
    auto g = [&](Complex z) {
        const Complex zc = std::conj(z);
        return rate * z + nf.g20 * z * z / 2.0 + nf.g11 * z * zc + nf.g02 * zc * zc / 2.0 +
               nf.g21 * z * z * zc / 2.0;
    };
    const auto n = static_cast<std::size_t>(std::ceil(t_end / step - 1e-9));
    ComplexPath out;
    out.t.reserve(n + 1);
    out.z.reserve(n + 1);
    Complex z = z0;
    out.t.push_back(0.0);
    out.z.push_back(z);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * step;
        const double h = std::min(step, t_end - t);
        const Complex k1 = g(z);
        const Complex k2 = g(z + 0.5 * h * k1);
        const Complex k3 = g(z + 0.5 * h * k2);
        const Complex k4 = g(z + h * k3);
        z += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            throw NumericalError("integrate_reduced: reduced flow diverged");
        }
        out.t.push_back(t + h);
        out.z.push_back(z);
    }
    return out;
}

Trajectory reconstruct_center_manifold(const NormalForm& nf, const Eigenpair& ep, const Equilibrium& eq,
                                       std::span<const double> t, std::span<const Complex> z) {
    if (t.size() != z.size()) {
        throw DomainError("reconstruct_center_manifold: time and z paths differ in length");
    }
    const Eigen::Vector4cd w20 = center_manifold_w20(nf, ep, 0.0);
    const Eigen::Vector4cd w11 = center_manifold_w11(nf, ep, 0.0);
    const StateVec base = eq.state();
    Trajectory tr;
    tr.meta.equilibrium = base;
    tr.t.assign(t.begin(), t.end());
    tr.x.reserve(z.size());
    for (const Complex& zi : z) {
        // The conj(z) and conj(z)^2 terms are the conjugates of the z and z^2 terms.
        std::array<double, 4> comp{};
        for (int k = 0; k < 4; ++k) {
            comp[k] = 2.0 * (zi * ep.v(k)).real() + (zi * zi * w20(k)).real() + std::norm(zi) * w11(k).real();
        }
        tr.x.push_back(base + StateVec::from_array(comp));
    }
    return tr;
}

std::optional<double> oscillation_period(std::span<const double> t, std::span<const double> series, double level,
                                         double t_from) {
    std::vector<double> crossings;
    for (std::size_t i = 1; i < t.size() && i < series.size(); ++i) {
        if (t[i - 1] < t_from) {
            continue;
        }
        const double a = series[i - 1] - level;
        const double b = series[i] - level;
        if (a < 0.0 && b >= 0.0) {
            crossings.push_back(t[i - 1] + (t[i] - t[i - 1]) * (-a) / (b - a));
        }
    }
    if (crossings.size() < 2) {
        return std::nullopt;
    }
    return (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
}

std::vector<double> column(const Trajectory& tr, double StateVec::*member) {
    std::vector<double> out;
    out.reserve(tr.x.size());
    for (const auto& s : tr.x) {
        out.push_back(s.*member);
    }
    return out;
}

} // namespace p53hopf
