#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "p53hopf/equilibrium.hpp"
#include "p53hopf/errors.hpp"
#include "p53hopf/normal_form.hpp"
#include "p53hopf/simulation.hpp"
#include "p53hopf/stability.hpp"

using namespace p53hopf;
using cd = std::complex<double>;

namespace {

ModelParams preset(int n) {
    ModelParams p;
    p.n = n;
    return p;
}

struct Case {
    ModelParams p;
    Equilibrium eq;
    HopfPoint hopf;
};

Case make_case(int n) {
    Case c;
    c.p = preset(n);
    c.eq = compute_equilibria(c.p).at(0);
    c.hopf = find_hopf_point(char_coeffs(c.p, c.eq)).value();
    return c;
}

StateVec run_to(const Case& c, double tau, std::size_t m, double t_end) {
    const double step = tau / static_cast<double>(m);
    const auto hist = perturbed_equilibrium_history(c.eq, tau, step, 0.01);
    IntegrateOptions opts;
    opts.output_stride = 1u << 30;
    return integrate(c.p, tau, hist, t_end, step, opts).x.back();
}

// Peak-to-peak of `y` over consecutive windows of length `period` within [t_from, t_end].
std::vector<double> window_amplitudes(const std::vector<double>& t, const std::vector<double>& y, double t_from,
                                      double period) {
    std::vector<double> amps;
    double lo = 1e300, hi = -1e300, start = t_from;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_from) {
            continue;
        }
        if (t[i] >= start + period) {
            amps.push_back(hi - lo);
            lo = 1e300;
            hi = -1e300;
            start += period;
        }
        lo = std::min(lo, y[i]);
        hi = std::max(hi, y[i]);
    }
    return amps;
}

} // namespace

TEST_CASE("step must divide the delay") {
    CHECK(steps_per_delay(1.0, 0.25) == 4);
    CHECK_THROWS_AS((void)steps_per_delay(1.0, 0.3), DomainError);
    CHECK_THROWS_AS((void)steps_per_delay(1.0, 2.0), DomainError);
    const auto c = make_case(2);
    const auto hist = constant_history(1.0, 0.25, c.eq.state());
    CHECK_THROWS_AS((void)integrate(c.p, 1.0, hist, 10.0, 0.5), DomainError);
}

TEST_CASE("x1 follows its closed form") {
    const auto c = make_case(4);
    StateVec x0 = c.eq.state();
    x0.x1 = 3.0;
    const double tau = 5.0, step = tau / 200;
    const auto tr = integrate(c.p, tau, constant_history(tau, step, x0), 10.0, step);
    const double expected = 1.0 / c.p.b1 + (3.0 - 1.0 / c.p.b1) * std::exp(-c.p.b1 * 10.0);
    CHECK(tr.t.back() == doctest::Approx(10.0));
    CHECK(std::abs(tr.x.back().x1 - expected) < 1e-8);
}

TEST_CASE("equilibrium history stays put") {
    // stable presets only; at n = 164 round-off grows along the unstable directions
    for (int n : {2, 4, 163}) {
        const auto c = make_case(n);
        const double tau = 0.5 * c.hopf.tau_c, step = tau / 32;
        const auto tr = integrate(c.p, tau, constant_history(tau, step, c.eq.state()), 20 * tau, step);
        double worst = 0.0;
        for (const auto& x : tr.x) {
            worst = std::max(worst, norm(x - c.eq.state()));
        }
        CAPTURE(n);
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("trajectory starts at the end of the history and time increases") {
    const auto c = make_case(2);
    const double tau = 45.0, step = tau / 64;
    const auto hist = sampled_history(
        tau, step, [&](double th) { return (1.0 + 0.01 * std::sin(th)) * c.eq.state(); },
        [&](double th) { return (0.01 * std::cos(th)) * c.eq.state(); });
    const auto tr = integrate(c.p, tau, hist, 200.0, step);
    CHECK(tr.x.front() == hist.values.back());
    CHECK(tr.t.front() == 0.0);
    for (std::size_t i = 1; i < tr.t.size(); ++i) {
        CHECK(tr.t[i] > tr.t[i - 1]);
    }
    CHECK(tr.meta.tau == tau);
    CHECK(tr.meta.step == step);
}

TEST_CASE("fourth-order self-convergence") {
    const auto c = make_case(2);
    const double tau = 45.0, t_end = 200.0;
    // y1 relaxes at rate a1 + a12 y20 ~ 1.73; steps well below 1 / 1.73 are in the asymptotic regime.
    const StateVec ref = run_to(c, tau, 4096, t_end);
    const double e1 = norm(run_to(c, tau, 512, t_end) - ref);
    const double e2 = norm(run_to(c, tau, 1024, t_end) - ref);
    const double order = std::log2(e1 / e2);
    CAPTURE(e1);
    CAPTURE(e2);
    CHECK(order == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("perturbations decay below the critical delay") {
    const auto c = make_case(2);
    const double tau = 0.5 * c.hopf.tau_c;
    const double step = tau / 64;
    IntegrateOptions opts;
    opts.equilibrium = c.eq.state();
    const auto tr =
        integrate(c.p, tau, perturbed_equilibrium_history(c.eq, tau, step, 0.01), 20 * c.hopf.tau_c, step, opts);
    const double d0 = norm(tr.x.front() - c.eq.state());
    const double d1 = norm(tr.x.back() - c.eq.state());
    CHECK(d1 < 0.1 * d0);
    CHECK(tr.meta.negative_samples == 0);
    REQUIRE(tr.meta.equilibrium.has_value());
}

TEST_CASE("negative states are counted, not clipped") {
    const auto c = make_case(2);
    StateVec x0 = c.eq.state();
    x0.x2 = -5.0;
    const double tau = 10.0, step = 0.5;
    const auto tr = integrate(c.p, tau, constant_history(tau, step, x0), 20.0, step);
    CHECK(tr.meta.negative_samples > 0);
    REQUIRE(tr.meta.first_negative_t.has_value());
    CHECK(*tr.meta.first_negative_t == 0.0);
    CHECK(tr.x.front().x2 == -5.0);
}

TEST_CASE("divergence aborts") {
    const auto c = make_case(2);
    IntegrateOptions opts;
    opts.divergence_threshold = 10.0;
    const double tau = 10.0, step = 0.5;
    CHECK_THROWS_AS((void)integrate(c.p, tau, constant_history(tau, step, c.eq.state()), 5.0, step, opts),
                    NumericalError);
}

TEST_CASE("reconstruction with z = 0 is the equilibrium") {
    const auto c = make_case(4);
    const auto nfa = analyze_normal_form(c.p, c.eq, c.hopf);
    const std::vector<double> t{0.0, 1.0, 2.0};
    const std::vector<cd> z(3, cd(0.0));
    const auto tr = reconstruct_center_manifold(nfa.form, nfa.eigen, c.eq, t, z);
    for (const auto& x : tr.x) {
        CHECK(x == c.eq.state());
    }
}

TEST_CASE("linear truncation of the reconstruction") {
    const auto c = make_case(4);
    const auto ep = make_eigenpair(c.p, c.eq, c.hopf.omega_c, c.hopf.tau_c);
    NormalForm nf; // all coefficients zero, so w20 = w11 = 0
    const std::vector<double> t{0.0, 1.0};
    const std::vector<cd> z{cd(1e-6, 0.0), cd(3e-7, -8e-7)};
    const auto tr = reconstruct_center_manifold(nf, ep, c.eq, t, z);
    for (std::size_t i = 0; i < t.size(); ++i) {
        const Eigen::Vector4cd lin = 2.0 * (z[i] * ep.v).real().cast<cd>();
        const auto base = c.eq.state().to_array();
        const auto got = tr.x[i].to_array();
        for (int k = 0; k < 4; ++k) {
            CHECK(std::abs(got[k] - (base[k] + lin(k).real())) < 1e-12);
        }
    }
}

TEST_CASE("reduced flow period near the critical frequency") {
    for (int n : {163, 164}) {
        const auto c = make_case(n);
        const auto nfa = analyze_normal_form(c.p, c.eq, c.hopf);
        const double period = 2 * std::numbers::pi / c.hopf.omega_c;
        const double t_end = 50 * period;
        const auto path = integrate_reduced(nfa.form, nfa.eigen, c.hopf.dlambda_dtau, 0.05 * c.hopf.tau_c,
                                            cd(0.01, 0.0), t_end, period / 200);
        const auto mf = reconstruct_center_manifold(nfa.form, nfa.eigen, c.eq, path.t, path.z);
        const auto measured = oscillation_period(mf.t, column(mf, &StateVec::y1), c.eq.y10, 2 * t_end / 3);
        REQUIRE(measured.has_value());
        CAPTURE(n);
        CHECK(*measured == doctest::Approx(period).epsilon(0.10));
    }
}

TEST_CASE("supercritical oscillation: full model against the reduced flow") {
    // n = 163 has a stable equilibrium below tau_c and mu2 > 0.
    const auto c = make_case(163);
    const auto nfa = analyze_normal_form(c.p, c.eq, c.hopf);
    REQUIRE(nfa.form.mu2 > 0.0);
    const double tau = 1.05 * c.hopf.tau_c;
    const double w = c.hopf.omega_c;
    const double period = 2 * std::numbers::pi / w;
    const double t_end = 30 * period;
    const double step = tau / 64;
    const Eigen::Vector4cd v = nfa.eigen.v;
    // predicted cycle: X = X0 + 2 Re(z v), |z| = r with r^2 = (tau - tau_c) / mu2
    const double r = std::sqrt((tau - c.hopf.tau_c) / nfa.form.mu2);

    struct Run {
        std::vector<double> amps;
        std::optional<double> period;
    };
    auto run = [&](double scale) {
        const double r0 = scale * r;
        auto phi = [&](double th) {
            const Eigen::Vector4cd z = r0 * std::exp(cd(0.0, w * th)) * v;
            StateVec x = c.eq.state();
            x.x1 += 2 * z(0).real();
            x.y1 += 2 * z(1).real();
            x.x2 += 2 * z(2).real();
            x.y2 += 2 * z(3).real();
            return x;
        };
        auto dphi = [&](double th) {
            const Eigen::Vector4cd z = r0 * cd(0.0, w) * std::exp(cd(0.0, w * th)) * v;
            return StateVec{2 * z(0).real(), 2 * z(1).real(), 2 * z(2).real(), 2 * z(3).real()};
        };
        IntegrateOptions opts;
        opts.output_stride = 50;
        const auto tr = integrate(c.p, tau, sampled_history(tau, step, phi, dphi), t_end, step, opts);
        const auto y1 = column(tr, &StateVec::y1);
        return Run{window_amplitudes(tr.t, y1, 0.0, period), oscillation_period(tr.t, y1, c.eq.y10, 2 * t_end / 3)};
    };

    const auto on = run(1.0);
    REQUIRE(on.amps.size() >= 20);
    REQUIRE(on.period.has_value());
    CHECK(*on.period == doctest::Approx(period).epsilon(0.02));
    const double predicted = 4.0 * r * std::abs(v(1)); // peak-to-peak of y1
    CHECK(on.amps.back() == doctest::Approx(predicted).epsilon(0.2));
    CHECK(std::abs(on.amps.back() / on.amps.front() - 1.0) < 0.01);

    // larger orbits shrink, smaller ones grow: the cycle attracts from both sides
    const auto big = run(2.0);
    const auto small = run(0.5);
    CHECK(big.amps.back() < big.amps.front());
    CHECK(small.amps.back() > small.amps.front());
    CHECK(big.amps.back() / big.amps.front() < on.amps.back() / on.amps.front());
    CHECK(small.amps.back() / small.amps.front() > on.amps.back() / on.amps.front());

    // the reduced flow predicts the same period
    const auto path = integrate_reduced(nfa.form, nfa.eigen, c.hopf.dlambda_dtau, tau - c.hopf.tau_c,
                                        cd(r, 0.0), t_end, period / 200);
    const auto mf = reconstruct_center_manifold(nfa.form, nfa.eigen, c.eq, path.t, path.z);
    const auto reduced = oscillation_period(mf.t, column(mf, &StateVec::y1), c.eq.y10, 2 * t_end / 3);
    REQUIRE(reduced.has_value());
    CHECK(*on.period == doctest::Approx(*reduced).epsilon(0.10));
}

TEST_CASE("oscillation period of a sine") {
    std::vector<double> t, y;
    for (int i = 0; i <= 10000; ++i) {
        t.push_back(0.01 * i);
        y.push_back(std::sin(2 * std::numbers::pi * t.back() / 7.0));
    }
    const auto p = oscillation_period(t, y, 0.0, 0.0);
    REQUIRE(p.has_value());
    CHECK(*p == doctest::Approx(7.0).epsilon(1e-6));
    CHECK_FALSE(oscillation_period(t, y, 5.0, 0.0).has_value());
}
