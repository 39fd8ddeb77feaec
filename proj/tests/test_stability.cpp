#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "oracles.hpp"
#include "p53hopf/equilibrium.hpp"
#include "p53hopf/errors.hpp"
#include "p53hopf/stability.hpp"

using namespace p53hopf;
using cd = std::complex<double>;

namespace {

ModelParams preset(int n) {
    ModelParams p;
    p.n = n;
    return p;
}

struct Setup {
    ModelParams p;
    Equilibrium eq;
    CharCoeffs cc;
    oracle::Jacobians J;
};

Setup setup(int n) {
    Setup s;
    s.p = preset(n);
    s.eq = compute_equilibria(s.p).at(0);
    s.cc = char_coeffs(s.p, s.eq);
    s.J = oracle::fd_jacobians(s.eq.state().to_array(), s.p);
    return s;
}

int eigen_unstable_count(const Eigen::Matrix4d& M) {
    Eigen::EigenSolver<Eigen::Matrix4d> es(M);
    int count = 0;
    for (int i = 0; i < 4; ++i) {
        if (es.eigenvalues()(i).real() > 0.0) {
            ++count;
        }
    }
    return count;
}

} // namespace

TEST_CASE("linearization matches finite-difference Jacobians") {
    for (int n : {2, 4, 163, 164}) {
        const auto s = setup(n);
        const auto lp = linearize(s.p, s.eq);
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                CAPTURE(n);
                CAPTURE(i);
                CAPTURE(j);
                CHECK(std::abs(lp.A(i, j) - s.J.A(i, j)) <= 1e-6 * std::max(1.0, std::abs(s.J.A(i, j))));
                CHECK(std::abs(lp.B(i, j) - s.J.B(i, j)) <= 1e-6 * std::max(1.0, std::abs(s.J.B(i, j))));
            }
        }
    }
}

TEST_CASE("linearization sparsity and coupling") {
    const auto s = setup(2);
    const auto lp = linearize(s.p, s.eq);
    CHECK(lp.A(1, 1) == doctest::Approx(-(0.13 + 0.02 * 79.96962531)).epsilon(1e-6));
    CHECK(lp.B(1, 3) == doctest::Approx(-s.p.a12 * s.eq.y10));
    CHECK(lp.B(2, 1) == doctest::Approx(s.eq.rho1));
    CHECK(lp.B(3, 1) == doctest::Approx(-s.p.a21 * s.eq.y20));
    int nonzero_b = 0;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            nonzero_b += lp.B(i, j) != 0.0;
        }
    }
    CHECK(nonzero_b == 3);

    auto p = preset(2);
    p.a12 = 0.0;
    const auto eq = compute_equilibria(p).at(0);
    const auto lp0 = linearize(p, eq);
    CHECK(lp0.B.row(1).isZero());
    const auto cc = char_coeffs(p, eq);
    CHECK(cc.g == 0.0);
    CHECK(cc.h == 0.0);
}

TEST_CASE("characteristic function factors the delayed determinant") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> re(-1.0, 1.0), im(-2.0, 2.0), tt(0.0, 20.0);
    for (int n : {2, 4, 163, 164}) {
        const auto s = setup(n);
        for (int trial = 0; trial < 20; ++trial) {
            const cd lambda(re(rng), im(rng));
            const double tau = tt(rng);
            const cd det = oracle::det_delta(s.J.A, s.J.B, lambda, tau);
            const cd factored = (lambda + s.p.b1) * char_function(s.cc, lambda, tau);
            CAPTURE(n);
            CHECK(std::abs(det - factored) <= 1e-6 * std::max(1.0, std::abs(det)));
        }
        // lambda = -b1 is always a root; the x1 row carries a single entry, so use the exact matrices
        const auto lp = linearize(s.p, s.eq);
        for (int trial = 0; trial < 5; ++trial) {
            CHECK(std::abs(oracle::det_delta(lp.A, lp.B, cd(-s.p.b1, 0.0), tt(rng))) < 1e-10);
        }
    }
}

TEST_CASE("cubic coefficient identities") {
    for (int n : {2, 4, 163, 164}) {
        const auto cc = setup(n).cc;
        CHECK(cc.b > 0.0);
        CHECK(cc.l1 == doctest::Approx(cc.b * cc.b - 2 * cc.c));
        CHECK(cc.l2 == doctest::Approx(cc.c * cc.c - 2 * cc.b * cc.d - cc.g * cc.g));
        CHECK(cc.l3 == doctest::Approx(cc.d * cc.d - cc.h * cc.h));
    }
    CHECK(setup(2).cc.l3 < 0.0);
}

TEST_CASE("Routh-Hurwitz examples") {
    CharCoeffs cc;
    cc.b = 1.0;
    cc.c = 2.0;
    cc.d = 1.0;
    CHECK(routh_hurwitz_stable(cc));
    cc.c = 1.0;
    cc.d = 2.0;
    CHECK_FALSE(routh_hurwitz_stable(cc));
}

TEST_CASE("undelayed stability agrees with eigenvalues of A + B") {
    for (int n : {1, 2, 3, 4, 20, 163, 164}) {
        const auto s = setup(n);
        const int count = eigen_unstable_count(s.J.A + s.J.B);
        CAPTURE(n);
        CHECK(unstable_root_count_undelayed(s.cc) == count);
        CHECK(routh_hurwitz_stable(s.cc) == (count == 0));
    }
    CHECK(routh_hurwitz_stable(setup(2).cc));
    CHECK_FALSE(routh_hurwitz_stable(setup(164).cc));
}

TEST_CASE("planted frequency cubic") {
    // (z + 1)(z - 0.25)(z - 4)
    const auto z = real_cubic_roots(-3.25, -3.25, 1.0);
    REQUIRE(z.size() == 3);
    CharCoeffs cc;
    cc.l1 = -3.25;
    cc.l2 = -3.25;
    cc.l3 = 1.0;
    const auto w = omega_candidates(cc);
    REQUIRE(w.size() == 2);
    CHECK(w[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(w[1] == doctest::Approx(2.0).epsilon(1e-14));

    // l3 >= 0 with l1, l2 > 0 has no positive root
    cc.l1 = 1.0;
    cc.l2 = 2.0;
    cc.l3 = 0.5;
    CHECK(omega_candidates(cc).empty());
}

TEST_CASE("every candidate solves both real equations") {
    for (int n : {2, 4, 163, 164}) {
        const auto s = setup(n);
        const auto cand = delay_candidates(s.cc);
        REQUIRE_FALSE(cand.empty());
        for (const auto& c : cand) {
            const double w = c.omega;
            const double ang = 2 * w * c.tau;
            const double eq1 = -s.cc.b * w * w + s.cc.d + s.cc.h * std::cos(ang) + w * s.cc.g * std::sin(ang);
            const double eq2 = -w * w * w + s.cc.c * w + w * s.cc.g * std::cos(ang) - s.cc.h * std::sin(ang);
            CAPTURE(n);
            CAPTURE(c.tau);
            CHECK(std::abs(eq1) < 1e-8);
            CHECK(std::abs(eq2) < 1e-8);
            CHECK(c.residual < 1e-9);
            CHECK(c.modulus_defect < 1e-8);
            CHECK(std::abs(std::abs(delay_ratio(s.cc, cd(0.0, w))) - 1.0) < 1e-8);
        }
        for (std::size_t i = 1; i < cand.size(); ++i) {
            CHECK(cand[i - 1].tau <= cand[i].tau);
        }
    }
}

TEST_CASE("critical delays are spaced by pi / omega") {
    const auto s = setup(4);
    const double w = omega_candidates(s.cc).at(0);
    const auto taus = critical_delays(w, s.cc, 5);
    REQUIRE(taus.size() == 6);
    for (std::size_t k = 1; k < taus.size(); ++k) {
        CHECK(taus[k] - taus[k - 1] == doctest::Approx(M_PI / w).epsilon(1e-12));
    }
    CHECK_THROWS_AS((void)critical_delays(w * 1.1, s.cc, 5), PreconditionError);
}

TEST_CASE("reference critical frequencies and delays") {
    struct Row {
        int n;
        double omega, tau, rel;
    };
    const Row rows[] = {{2, 0.01173958, 90.21567180, 1e-3},
                        {4, 0.02969208, 26.61818721, 1e-3},
                        {163, 0.42317766, 0.00213625, 1e-2},
                        {164, 0.42448028, 7.40096599, 1e-2}};
    for (const auto& r : rows) {
        CAPTURE(r.n);
        const auto s = setup(r.n);
        const auto h = find_hopf_point(s.cc);
        REQUIRE(h.has_value());
        CHECK(h->branch == 0);
        CHECK(h->omega_c == doctest::Approx(r.omega).epsilon(r.rel));
        CHECK(h->tau_c == doctest::Approx(r.tau).epsilon(r.rel));
        CHECK(std::abs(char_function(s.cc, cd(0.0, h->omega_c), h->tau_c)) < 1e-9);
    }
}

TEST_CASE("transversality matches root continuation") {
    for (int n : {2, 4, 163, 164}) {
        const auto s = setup(n);
        const auto h = find_hopf_point(s.cc).value();
        const cd fd = oracle::continuation_derivative(s.J.A, s.J.B, h.omega_c, h.tau_c);
        CAPTURE(n);
        CHECK(std::abs(h.dlambda_dtau - fd) <= 1e-4 * std::abs(fd));
        CHECK(std::abs(h.dlambda_dtau.real()) > 1e-12);
        CHECK(h.dlambda_dtau.real() > 0.0);
    }
}

TEST_CASE("printed transversality form is evaluated alongside") {
    const auto s = setup(2);
    const auto h = find_hopf_point(s.cc).value();
    const auto printed = transversality_printed(h.omega_c, h.tau_c, s.cc);
    CHECK(printed.value == h.dlambda_dtau_printed);
    CHECK(std::isfinite(printed.L1));
    CHECK(std::isfinite(printed.L2));
    // the two forms disagree; the report flags this
    CHECK(std::abs(printed.value - h.dlambda_dtau) > 1e-3 * std::abs(h.dlambda_dtau));
}

TEST_CASE("stability verdicts around the critical delay") {
    const auto s = setup(2);
    const auto h = find_hopf_point(s.cc).value();
    CHECK(classify_stability(s.p, s.eq, 0.0) == StabilityVerdict::stable);
    CHECK(classify_stability(s.p, s.eq, 0.5 * h.tau_c) == StabilityVerdict::stable);
    CHECK(classify_stability(s.p, s.eq, h.tau_c) == StabilityVerdict::at_bifurcation);
    CHECK(classify_stability(s.p, s.eq, h.tau_c + 1.0) == StabilityVerdict::unstable);
    CHECK(std::string(to_string(StabilityVerdict::at_bifurcation)) == "at-bifurcation");

    // rightmost root by Newton from a grid, as an independent check at a few delays
    for (int n : {2, 4, 164}) {
        const auto t = setup(n);
        const double tc = find_hopf_point(t.cc).value().tau_c;
        for (double f : {0.5, 0.9, 1.1, 2.0}) {
            double rightmost = -1e9;
            for (double a = -0.3; a <= 0.3; a += 0.05) {
                for (double b = 0.0; b <= 1.0; b += 0.05) {
                    const cd z = oracle::newton_root(t.J.A, t.J.B, cd(a, b), f * tc);
                    if (std::abs(oracle::det_delta(t.J.A, t.J.B, z, f * tc)) < 1e-12 && std::abs(z) < 5.0) {
                        rightmost = std::max(rightmost, z.real());
                    }
                }
            }
            CAPTURE(n);
            CAPTURE(f);
            const auto v = classify_stability(t.p, t.eq, f * tc);
            CHECK((v == StabilityVerdict::unstable) == (rightmost > 0.0));
        }
    }
}

TEST_CASE("no coupling means no Hopf point") {
    auto p = preset(2);
    p.a12 = 0.0;
    const auto eq = compute_equilibria(p).at(0);
    const auto cc = char_coeffs(p, eq);
    CHECK(cc.l3 >= 0.0);
    CHECK(delay_candidates(cc).empty());
    CHECK_FALSE(find_hopf_point(cc).has_value());
}
