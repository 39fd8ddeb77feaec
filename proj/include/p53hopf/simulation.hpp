#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "p53hopf/equilibrium.hpp"
#include "p53hopf/model.hpp"
#include "p53hopf/normal_form.hpp"

namespace p53hopf {

/// Initial function sampled on the uniform grid theta_j = -tau + j step,
/// j = 0..m with m step = tau. Values and derivatives are both stored so
/// delayed lookups can use cubic Hermite interpolation.
struct History {
    double tau = 0.0;
    double step = 0.0;
    std::vector<StateVec> values;
    std::vector<StateVec> derivatives;

    [[nodiscard]] std::size_t steps_per_delay() const { return values.empty() ? 0 : values.size() - 1; }
};

/// Number of grid steps m with m step = tau. Throws DomainError when step
/// exceeds tau or does not divide it to relative 1e-9.
[[nodiscard]] std::size_t steps_per_delay(double tau, double step);

[[nodiscard]] History constant_history(double tau, double step, const StateVec& value);

[[nodiscard]] History sampled_history(double tau, double step, const std::function<StateVec(double)>& phi,
                                      const std::function<StateVec(double)>& dphi);

/// Constant history eq * (1 + relative_perturbation) componentwise.
[[nodiscard]] History perturbed_equilibrium_history(const Equilibrium& eq, double tau, double step,
                                                    double relative_perturbation);

struct TrajectoryMeta {
    ModelParams params;
    double tau = 0.0;
    double step = 0.0;
    std::optional<StateVec> equilibrium;
    std::size_t negative_samples = 0;       ///< output samples with a negative component
    std::optional<double> first_negative_t; ///< earliest step with a negative component
};

struct Trajectory {
    std::vector<double> t;
    std::vector<StateVec> x;
    TrajectoryMeta meta;
};

struct IntegrateOptions {
    std::size_t output_stride = 1;
    double divergence_threshold = 1e12;
    std::size_t max_steps = 100'000'000;
    std::optional<StateVec> equilibrium; ///< copied into the trajectory metadata
};

/// Classical RK4 by the method of steps. Grid nodes are aligned with
/// multiples of tau; delayed arguments at stage midpoints come from cubic
/// Hermite interpolation of stored nodes. If t_end is not a grid point the
/// last step is shortened. Negative concentrations are recorded, not
/// clipped. Throws DomainError on an inconsistent grid and NumericalError on
/// divergence (norm above the threshold) or when the step budget runs out.
[[nodiscard]] Trajectory integrate(const ModelParams& p, double tau, const History& history, double t_end,
                                   double step, const IntegrateOptions& opts = {});

struct ComplexPath {
    std::vector<double> t;
    std::vector<Complex> z;
};

/// RK4 solution of the reduced equation
///   z' = (lambda1 + delay_offset Re/Im l') z + g20 z^2/2 + g11 z conj(z) + g02 conj(z)^2/2 + g21 z^2 conj(z)/2
/// where delay_offset = tau - tau_c shifts the linear rate along the
/// transversal direction.
[[nodiscard]] ComplexPath integrate_reduced(const NormalForm& nf, const Eigenpair& ep, Complex dlambda_dtau,
                                            double delay_offset, Complex z0, double t_end, double step);

/// X = z Phi(0) + conj(z) conj(Phi(0)) + w20(0) z^2/2 + w11(0) z conj(z) + w02(0) conj(z)^2/2 + X0.
[[nodiscard]] Trajectory reconstruct_center_manifold(const NormalForm& nf, const Eigenpair& ep,
                                                     const Equilibrium& eq, std::span<const double> t,
                                                     std::span<const Complex> z);

/// Mean spacing of upward crossings of `level` by `series` for samples with
/// t >= t_from (linear interpolation between samples). Needs at least two
/// crossings.
[[nodiscard]] std::optional<double> oscillation_period(std::span<const double> t, std::span<const double> series,
                                                       double level, double t_from);

/// Component extractor for trajectory columns.
[[nodiscard]] std::vector<double> column(const Trajectory& tr, double StateVec::*member);

} // namespace p53hopf
