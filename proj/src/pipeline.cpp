#include "p53hopf/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <numbers>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "p53hopf/errors.hpp"

namespace p53hopf {

namespace {

constexpr std::size_t kMaxRows = 10000;
// Steps per oscillation period, used to cap the step when tau is long.
constexpr double kStepsPerPeriod = 200.0;

double rel_diff(double value, double reference) {
    if (reference == 0.0) {
        return std::abs(value);
    }
    return std::abs(value - reference) / std::abs(reference);
}

int sign(double v) {
    return (v > 0.0) - (v < 0.0);
}

template <class F>
void stage(EquilibriumReport& r, const char* name, F&& body) {
    try {
        body();
    } catch (const std::exception& e) {
        r.errors.push_back(fmt::format("{}: {}", name, e.what()));
        spdlog::debug("stage {} failed: {}", name, e.what());
    }
}

std::size_t stride_for(std::size_t steps) {
    return std::max<std::size_t>(1, (steps + kMaxRows - 1) / kMaxRows);
}

Trajectory thin(const Trajectory& tr, std::size_t stride) {
    if (stride <= 1) {
        return tr;
    }
    Trajectory out;
    out.meta = tr.meta;
    for (std::size_t i = 0; i < tr.t.size(); i += stride) {
        out.t.push_back(tr.t[i]);
        out.x.push_back(tr.x[i]);
    }
    if ((tr.t.size() - 1) % stride != 0) {
        out.t.push_back(tr.t.back());
        out.x.push_back(tr.x.back());
    }
    return out;
}

void simulate(const ModelParams& p, const Equilibrium& eq, const AnalysisConfig& cfg, EquilibriumReport& r,
              RunData* data) {
    const auto& sim = cfg.sim;
    double tau = 0.0;
    if (sim.tau) {
        tau = *sim.tau;
    } else if (cfg.tau) {
        tau = *cfg.tau;
    } else if (r.hopf) {
        tau = sim.tau_factor * r.hopf->tau_c;
    } else {
        return; // nothing sensible to simulate
    }
    if (!(tau > 0.0)) {
        throw ConfigError(fmt::format("simulation delay must be positive, got {}", tau));
    }
    const double period = r.hopf ? 2.0 * std::numbers::pi / r.hopf->omega_c : 0.0;

    std::size_t m = 0;
    if (sim.step) {
        m = static_cast<std::size_t>(std::max(1.0, std::round(tau / *sim.step)));
    } else {
        m = sim.steps_per_delay;
        if (period > 0.0) {
            m = std::max(m, static_cast<std::size_t>(std::ceil(tau * kStepsPerPeriod / period)));
        }
    }
    const double step = tau / static_cast<double>(m);

    double t_end = 0.0;
    if (sim.t_end) {
        t_end = *sim.t_end;
    } else if (period > 0.0) {
        t_end = 50.0 * period;
    } else {
        t_end = 200.0 * tau;
    }

    SimulationSummary s;
    s.tau = tau;
    s.step = step;
    s.t_end = t_end;
    s.steps_per_delay = m;

    const auto steps = static_cast<std::size_t>(std::ceil(t_end / step));
    IntegrateOptions opts;
    opts.output_stride = sim.stride ? *sim.stride : stride_for(steps);
    opts.equilibrium = eq.state();
    const History hist = perturbed_equilibrium_history(eq, tau, step, sim.perturbation);
    try {
        Trajectory tr = integrate(p, tau, hist, t_end, step, opts);
        s.samples = tr.t.size();
        s.negative_samples = tr.meta.negative_samples;
        s.initial_distance = norm(tr.x.front() - eq.state());
        s.final_distance = norm(tr.x.back() - eq.state());
        const auto y1 = column(tr, &StateVec::y1);
        s.period = oscillation_period(tr.t, y1, eq.y10, 2.0 * t_end / 3.0);
        if (data) {
            data->simulated = std::move(tr);
        }
    } catch (const std::exception& e) {
        s.error = e.what();
        r.errors.push_back(fmt::format("simulation: {}", e.what()));
    }

    if (r.normal_form && r.hopf && !r.normal_form->form.degenerate && s.error.empty()) {
        stage(r, "manifold", [&] {
            const auto& nfa = *r.normal_form;
            const double h = period / kStepsPerPeriod;
            const auto path = integrate_reduced(nfa.form, nfa.eigen, r.hopf->dlambda_dtau, tau - r.hopf->tau_c,
                                                Complex(sim.manifold_z0, 0.0), t_end, h);
            Trajectory mf = reconstruct_center_manifold(nfa.form, nfa.eigen, eq, path.t, path.z);
            const auto y1 = column(mf, &StateVec::y1);
            s.manifold_period = oscillation_period(mf.t, y1, eq.y10, 2.0 * t_end / 3.0);
            if (data) {
                data->manifold = thin(mf, stride_for(mf.t.size()));
            }
        });
    }
    r.simulation = s;
}

void compare_reference(const PublishedCase& pub, EquilibriumReport& r) {
    ReferenceComparison c;
    c.n = pub.n;
    c.x10_rel = rel_diff(r.eq.x10, pub.x10);
    c.y10_rel = rel_diff(r.eq.y10, pub.y10);
    c.x20_rel = rel_diff(r.eq.x20, pub.x20);
    c.y20_rel = rel_diff(r.eq.y20, pub.y20);

    for (std::size_t i = 0; i < r.candidates.size(); ++i) {
        const auto& cand = r.candidates[i];
        const double wr = rel_diff(cand.omega, pub.omega);
        const double tr = rel_diff(cand.tau, pub.tau);
        if (wr <= 1e-2 && tr <= 1e-2 &&
            (!c.matched_candidate || std::max(wr, tr) < std::max(c.omega_rel, c.tau_rel))) {
            c.matched_candidate = i;
            c.omega_rel = wr;
            c.tau_rel = tr;
        }
    }
    if (!c.matched_candidate) {
        r.flags.push_back(fmt::format("no candidate branch matches the published (omega, tau) = ({}, {})",
                                      pub.omega, pub.tau));
    }

    if (r.normal_form) {
        const auto& nf = r.normal_form->form;
        c.mu2_sign_match = sign(nf.mu2) == sign(pub.mu2);
        c.beta2_sign_match = sign(nf.beta2) == sign(pub.beta2);
        c.mu2_rel = rel_diff(nf.mu2, pub.mu2);
        c.beta2_rel = rel_diff(nf.beta2, pub.beta2);
        c.T2_rel = rel_diff(nf.T2, pub.T2);
        if (!c.mu2_sign_match) {
            r.flags.push_back(fmt::format("mu2 sign differs from published value {} (computed {})",
                                          pub.mu2, format_double(nf.mu2)));
        }
        if (!c.beta2_sign_match) {
            r.flags.push_back(fmt::format("beta2 sign differs from published value {} (computed {})",
                                          pub.beta2, format_double(nf.beta2)));
        }
        if (c.mu2_rel > 1e-2) {
            r.flags.push_back(fmt::format("mu2 magnitude differs from published value by relative {:.3g}", c.mu2_rel));
        }
        if (c.beta2_rel > 1e-2) {
            r.flags.push_back(
                fmt::format("beta2 magnitude differs from published value by relative {:.3g}", c.beta2_rel));
        }
        if (c.T2_rel > 1e-2) {
            r.flags.push_back(fmt::format("T2 magnitude differs from published value by relative {:.3g}", c.T2_rel));
        }
    }
    if (pub.text_says_period_increasing && pub.T2 < 0.0) {
        r.flags.push_back(fmt::format("published T2 = {} is negative but the published text calls the period "
                                      "increasing; reporting the sign-based verdict",
                                      pub.T2));
    }
    r.reference = c;
}

} // namespace

std::optional<PublishedCase> published_case(int n) {
    switch (n) {
    case 2:
        return PublishedCase{2, 1.25, 0.72279716, 11.55208766, 79.96962531,
                             -15.56012572, -0.00020024, -0.169703418, 0.01173958, 90.21567180, true};
    case 4:
        return PublishedCase{4, 1.25, 0.82091152, 10.19581588, 69.63487984,
                             -22.21740930, -0.00987558, -0.86252133, 0.02969208, 26.61818721, true};
    case 163:
        return PublishedCase{163, 1.25, 0.99390609, 8.45060883, 56.38320475,
                             -12.63855144, -0.53197047, 7.14847952, 0.42317766, 0.00213625, true};
    case 164:
        return PublishedCase{164, 1.25, 0.99394289, 8.45030131, 56.38087608,
                             4.70953378, -1.32779287, 3.42681695, 0.42448028, 7.40096599, true};
    default:
        return std::nullopt;
    }
}

EquilibriumReport analyze_equilibrium(const ModelParams& p, const Equilibrium& eq, const AnalysisConfig& cfg,
                                      std::optional<int> reference_case, RunData* data) {
    EquilibriumReport r;
    r.eq = eq;
    const auto coeffs = equilibrium_poly_coeffs(p);
    r.poly_residual = std::abs(poly_eval_scaled(coeffs, eq.y10));
    r.rhs_norm = norm(rhs(eq.state(), eq.state(), p));

    bool have_coeffs = false;
    stage(r, "stability", [&] {
        r.cc = char_coeffs(p, eq);
        have_coeffs = true;
        r.routh_hurwitz_stable = routh_hurwitz_stable(r.cc);
        r.unstable_roots_at_zero = unstable_root_count_undelayed(r.cc);
        if (r.unstable_roots_at_zero > 0) {
            r.flags.push_back(
                fmt::format("equilibrium is unstable at tau = 0 ({} roots in the right half-plane)",
                            r.unstable_roots_at_zero));
        }
    });
    if (!have_coeffs) {
        return r;
    }

    stage(r, "critical delay", [&] {
        r.candidates = delay_candidates(r.cc, cfg.k_max);
        r.hopf = find_hopf_point(r.cc, cfg.k_max);
        if (r.hopf) {
            const auto lambda = std::complex<double>(0.0, r.hopf->omega_c);
            r.hopf_residual = std::abs(char_function(r.cc, lambda, r.hopf->tau_c));
            r.hopf_modulus_defect = std::abs(std::abs(delay_ratio(r.cc, lambda)) - 1.0);
            r.transversality_printed_rel_diff =
                std::abs(r.hopf->dlambda_dtau_printed - r.hopf->dlambda_dtau) / std::abs(r.hopf->dlambda_dtau);
            if (r.transversality_printed_rel_diff > 1e-6) {
                r.flags.push_back(fmt::format(
                    "printed closed-form dlambda/dtau differs from implicit differentiation by relative {:.3g}",
                    r.transversality_printed_rel_diff));
            }
            if (sign(r.hopf->dlambda_dtau.real()) != sign(r.hopf->dlambda_dtau_printed.real())) {
                r.flags.push_back("printed closed-form dlambda/dtau has the opposite real-part sign");
            }
        }
    });

    if (r.hopf) {
        stage(r, "normal form", [&] { r.normal_form = analyze_normal_form(p, eq, *r.hopf, cfg.formulas); });
    }

    if (cfg.tau) {
        stage(r, "verdict", [&] { r.verdict_at_tau = classify_stability(p, eq, *cfg.tau); });
    }

    if (cfg.sim.enabled) {
        stage(r, "simulation", [&] { simulate(p, eq, cfg, r, data); });
    }

    if (reference_case) {
        if (auto pub = published_case(*reference_case)) {
            compare_reference(*pub, r);
        }
    }
    return r;
}

CaseReport analyze_case(const CaseSpec& spec, const AnalysisConfig& cfg, std::vector<RunData>* data) {
    CaseReport c;
    c.label = spec.label;
    c.params = spec.params;
    c.reference_case = spec.reference_case;
    std::vector<Equilibrium> eqs;
    try {
        validate(spec.params);
        eqs = compute_equilibria(spec.params);
    } catch (const std::exception& e) {
        c.error = fmt::format("equilibrium: {}", e.what());
        return c;
    }

    // The published values belong to the equilibrium closest in y10.
    std::optional<std::size_t> ref_index;
    if (spec.reference_case) {
        if (auto pub = published_case(*spec.reference_case)) {
            double best = 0.0;
            for (std::size_t i = 0; i < eqs.size(); ++i) {
                const double d = std::abs(eqs[i].y10 - pub->y10);
                if (!ref_index || d < best) {
                    ref_index = i;
                    best = d;
                }
            }
        }
    }

    for (std::size_t i = 0; i < eqs.size(); ++i) {
        RunData run;
        run.stem = fmt::format("{}_eq{}", spec.label, i);
        const auto ref = (ref_index && *ref_index == i) ? spec.reference_case : std::nullopt;
        spdlog::info("{}: equilibrium {} at y10 = {}", spec.label, i, format_double(eqs[i].y10));
        c.equilibria.push_back(analyze_equilibrium(spec.params, eqs[i], cfg, ref, data ? &run : nullptr));
        if (data) {
            data->push_back(std::move(run));
        }
    }
    return c;
}

AnalysisResult run_analysis(const AnalysisConfig& cfg) {
    validate(cfg);
    const auto cases = expand_cases(cfg);
    std::vector<CaseReport> reports(cases.size());
    std::vector<std::vector<RunData>> runs(cases.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cases.size(); i = next++) {
            reports[i] = analyze_case(cases[i], cfg, &runs[i]);
        }
    };
    const std::size_t n_workers = std::clamp<std::size_t>(cfg.workers, 1, std::max<std::size_t>(1, cases.size()));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < n_workers; ++w) {
            pool.emplace_back(worker);
        }
    }

    AnalysisResult out;
    out.report.formulas = cfg.formulas;
    out.report.tau = cfg.tau;
    out.report.cases = std::move(reports);
    for (auto& r : runs) {
        for (auto& d : r) {
            out.runs.push_back(std::move(d));
        }
    }
    return out;
}

std::string trajectory_csv(const Trajectory& tr) {
    std::string out = "t,x1,y1,x2,y2\n";
    for (std::size_t i = 0; i < tr.t.size(); ++i) {
        const auto& x = tr.x[i];
        out += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", tr.t[i], x.x1, x.y1, x.x2, x.y2);
    }
    return out;
}

std::string phase_csv(const Trajectory& tr) {
    std::string out = "y1,y2\n";
    for (const auto& x : tr.x) {
        out += fmt::format("{:.17g},{:.17g}\n", x.y1, x.y2);
    }
    return out;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw IoError(fmt::format("cannot open {} for writing", path.string()));
    }
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.close();
    if (!f) {
        throw IoError(fmt::format("failed writing {}", path.string()));
    }
}

} // namespace

void emit_outputs(const AnalysisReport& report, const std::vector<RunData>& runs, const std::filesystem::path& outdir) {
    std::error_code ec;
    std::filesystem::create_directories(outdir, ec);
    if (ec) {
        throw IoError(fmt::format("cannot create output directory {}: {}", outdir.string(), ec.message()));
    }
    write_file(outdir / "report.txt", render_report(report));
    for (const auto& run : runs) {
        if (run.simulated) {
            write_file(outdir / (run.stem + "_trajectory.csv"), trajectory_csv(*run.simulated));
            write_file(outdir / (run.stem + "_phase.csv"), phase_csv(*run.simulated));
        }
        if (run.manifold) {
            write_file(outdir / (run.stem + "_manifold.csv"), trajectory_csv(*run.manifold));
        }
    }
}

} // namespace p53hopf
