#include "p53hopf/report.hpp"

#include <fmt/format.h>

namespace p53hopf {

namespace {

class FieldWriter {
public:
    explicit FieldWriter(std::vector<ReportField>& out) : out_(out) {}

    void num(const std::string& key, double v) { out_.push_back({key, v}); }
    void integer(const std::string& key, long v) { out_.push_back({key, v}); }
    void flag(const std::string& key, bool v) { out_.push_back({key, v}); }
    void text(const std::string& key, std::string v) { out_.push_back({key, std::move(v)}); }
    void cplx(const std::string& key, Complex v) {
        num(key + ".re", v.real());
        num(key + ".im", v.imag());
    }
    void vec(const std::string& key, const Eigen::Vector4cd& v) {
        for (int i = 0; i < 4; ++i) {
            cplx(fmt::format("{}.{}", key, i + 1), v(i));
        }
    }

private:
    std::vector<ReportField>& out_;
};

void write_params(FieldWriter& w, const std::string& k, const ModelParams& p) {
    w.num(k + ".a1", p.a1);
    w.num(k + ".a2", p.a2);
    w.num(k + ".a12", p.a12);
    w.num(k + ".a21", p.a21);
    w.num(k + ".b1", p.b1);
    w.num(k + ".b2", p.b2);
    w.num(k + ".a", p.a);
    w.integer(k + ".n", p.n);
}

void write_normal_form(FieldWriter& w, const std::string& k, const NormalFormAnalysis& a) {
    w.vec(k + ".v", a.eigen.v);
    w.vec(k + ".w", a.eigen.w.transpose());
    w.cplx(k + ".eta", a.eigen.eta);
    w.num(k + ".right_residual", a.right_residual);
    w.num(k + ".left_residual", a.left_residual);
    const auto& nf = a.form;
    w.cplx(k + ".g20", nf.g20);
    w.cplx(k + ".g11", nf.g11);
    w.cplx(k + ".g02", nf.g02);
    w.cplx(k + ".g21", nf.g21);
    w.vec(k + ".E1", nf.E1);
    w.vec(k + ".E2", nf.E2);
    w.num(k + ".E1_residual", a.evectors.residual1);
    w.num(k + ".E2_residual", a.evectors.residual2);
    w.cplx(k + ".C1", nf.C1);
    w.num(k + ".mu2", nf.mu2);
    w.num(k + ".beta2", nf.beta2);
    w.num(k + ".T2", nf.T2);
    w.flag(k + ".degenerate", nf.degenerate);
    w.text(k + ".direction", nf.direction);
    w.text(k + ".orbit_stability", nf.orbit_stability);
    w.text(k + ".period_trend", nf.period_trend);
}

void write_equilibrium(FieldWriter& w, const std::string& k, const EquilibriumReport& e) {
    w.num(k + ".x10", e.eq.x10);
    w.num(k + ".y10", e.eq.y10);
    w.num(k + ".x20", e.eq.x20);
    w.num(k + ".y20", e.eq.y20);
    w.num(k + ".rho1", e.eq.rho1);
    w.num(k + ".rho2", e.eq.rho2);
    w.num(k + ".rho3", e.eq.rho3);
    w.num(k + ".poly_residual", e.poly_residual);
    w.num(k + ".rhs_norm", e.rhs_norm);
    const auto& cc = e.cc;
    w.num(k + ".coeff.b", cc.b);
    w.num(k + ".coeff.c", cc.c);
    w.num(k + ".coeff.d", cc.d);
    w.num(k + ".coeff.g", cc.g);
    w.num(k + ".coeff.h", cc.h);
    w.num(k + ".coeff.l1", cc.l1);
    w.num(k + ".coeff.l2", cc.l2);
    w.num(k + ".coeff.l3", cc.l3);
    w.flag(k + ".routh_hurwitz_stable", e.routh_hurwitz_stable);
    w.integer(k + ".unstable_roots_at_zero", e.unstable_roots_at_zero);
    w.integer(k + ".candidates", static_cast<long>(e.candidates.size()));
    for (std::size_t i = 0; i < e.candidates.size(); ++i) {
        const auto& c = e.candidates[i];
        const auto ck = fmt::format("{}.candidate{}", k, i);
        w.num(ck + ".omega", c.omega);
        w.integer(ck + ".branch", c.branch);
        w.num(ck + ".tau", c.tau);
        w.num(ck + ".modulus_defect", c.modulus_defect);
        w.num(ck + ".residual", c.residual);
        w.cplx(ck + ".dlambda_dtau", c.dlambda_dtau);
    }
    w.flag(k + ".hopf.exists", e.hopf.has_value());
    if (e.hopf) {
        const auto& h = *e.hopf;
        w.num(k + ".hopf.omega_c", h.omega_c);
        w.num(k + ".hopf.tau_c", h.tau_c);
        w.integer(k + ".hopf.branch", h.branch);
        w.num(k + ".hopf.residual", e.hopf_residual);
        w.num(k + ".hopf.modulus_defect", e.hopf_modulus_defect);
        w.cplx(k + ".hopf.dlambda_dtau", h.dlambda_dtau);
        w.num(k + ".hopf.printed.L1", h.L1);
        w.num(k + ".hopf.printed.L2", h.L2);
        w.cplx(k + ".hopf.printed.dlambda_dtau", h.dlambda_dtau_printed);
        w.num(k + ".hopf.printed.rel_diff", e.transversality_printed_rel_diff);
    }
    if (e.normal_form) {
        write_normal_form(w, k + ".nf", *e.normal_form);
    }
    if (e.verdict_at_tau) {
        w.text(k + ".verdict_at_tau", to_string(*e.verdict_at_tau));
    }
    if (e.simulation) {
        const auto& s = *e.simulation;
        const auto sk = k + ".sim";
        w.num(sk + ".tau", s.tau);
        w.num(sk + ".step", s.step);
        w.num(sk + ".t_end", s.t_end);
        w.integer(sk + ".steps_per_delay", static_cast<long>(s.steps_per_delay));
        w.integer(sk + ".samples", static_cast<long>(s.samples));
        w.integer(sk + ".negative_samples", static_cast<long>(s.negative_samples));
        w.num(sk + ".initial_distance", s.initial_distance);
        w.num(sk + ".final_distance", s.final_distance);
        if (s.period) {
            w.num(sk + ".period", *s.period);
        }
        if (s.manifold_period) {
            w.num(sk + ".manifold_period", *s.manifold_period);
        }
        if (!s.error.empty()) {
            w.text(sk + ".error", s.error);
        }
    }
    if (e.reference) {
        const auto& r = *e.reference;
        const auto rk = k + ".reference";
        w.integer(rk + ".n", r.n);
        w.num(rk + ".x10_rel", r.x10_rel);
        w.num(rk + ".y10_rel", r.y10_rel);
        w.num(rk + ".x20_rel", r.x20_rel);
        w.num(rk + ".y20_rel", r.y20_rel);
        w.flag(rk + ".branch_matched", r.matched_candidate.has_value());
        if (r.matched_candidate) {
            w.integer(rk + ".matched_candidate", static_cast<long>(*r.matched_candidate));
            w.num(rk + ".omega_rel", r.omega_rel);
            w.num(rk + ".tau_rel", r.tau_rel);
        }
        w.flag(rk + ".mu2_sign_match", r.mu2_sign_match);
        w.flag(rk + ".beta2_sign_match", r.beta2_sign_match);
        w.num(rk + ".mu2_rel", r.mu2_rel);
        w.num(rk + ".beta2_rel", r.beta2_rel);
        w.num(rk + ".T2_rel", r.T2_rel);
    }
    w.integer(k + ".flags", static_cast<long>(e.flags.size()));
    for (std::size_t i = 0; i < e.flags.size(); ++i) {
        w.text(fmt::format("{}.flag{}", k, i), e.flags[i]);
    }
    w.integer(k + ".errors", static_cast<long>(e.errors.size()));
    for (std::size_t i = 0; i < e.errors.size(); ++i) {
        w.text(fmt::format("{}.error{}", k, i), e.errors[i]);
    }
}

std::string sanitize(std::string s) {
    for (char& ch : s) {
        if (ch == '\n' || ch == '\r' || ch == '#') {
            ch = ' ';
        }
    }
    return s;
}

} // namespace

bool AnalysisReport::has_errors() const {
    for (const auto& c : cases) {
        if (!c.error.empty()) {
            return true;
        }
        for (const auto& e : c.equilibria) {
            if (!e.errors.empty()) {
                return true;
            }
        }
    }
    return false;
}

std::vector<ReportField> flatten(const AnalysisReport& report) {
    std::vector<ReportField> out;
    FieldWriter w(out);
    w.flag("formula.literal_f4_11", report.formulas.literal_f4_11);
    w.flag("formula.literal_f4_02", report.formulas.literal_f4_02);
    w.flag("formula.literal_w20_conj", report.formulas.literal_w20_conj);
    w.flag("formula.literal_f21_args", report.formulas.literal_f21_args);
    if (report.tau) {
        w.num("tau", *report.tau);
    }
    w.integer("cases", static_cast<long>(report.cases.size()));
    for (std::size_t ci = 0; ci < report.cases.size(); ++ci) {
        const auto& c = report.cases[ci];
        const auto k = fmt::format("case{}", ci);
        w.text(k + ".label", c.label);
        write_params(w, k + ".model", c.params);
        if (c.reference_case) {
            w.integer(k + ".reference_case", *c.reference_case);
        }
        if (!c.error.empty()) {
            w.text(k + ".error", c.error);
        }
        w.integer(k + ".equilibria", static_cast<long>(c.equilibria.size()));
        for (std::size_t ei = 0; ei < c.equilibria.size(); ++ei) {
            write_equilibrium(w, fmt::format("{}.eq{}", k, ei), c.equilibria[ei]);
        }
    }
    return out;
}

std::string format_double(double v) {
    return fmt::format("{:.17g}", v);
}

std::string render_report(const AnalysisReport& report) {
    std::string out = "# Hopf bifurcation analysis report\n";
    for (const auto& f : flatten(report)) {
        out += f.key;
        out += " = ";
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, double>) {
                    out += format_double(v);
                } else if constexpr (std::is_same_v<T, long>) {
                    out += fmt::format("{}", v);
                } else if constexpr (std::is_same_v<T, bool>) {
                    out += v ? "true" : "false";
                } else {
                    out += sanitize(v);
                }
            },
            f.value);
        out += '\n';
    }
    return out;
}

} // namespace p53hopf
