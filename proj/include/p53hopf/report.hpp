#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "p53hopf/equilibrium.hpp"
#include "p53hopf/model.hpp"
#include "p53hopf/normal_form.hpp"
#include "p53hopf/stability.hpp"

namespace p53hopf {

struct SimulationSummary {
    double tau = 0.0;
    double step = 0.0;
    double t_end = 0.0;
    std::size_t steps_per_delay = 0;
    std::size_t samples = 0;
    std::size_t negative_samples = 0;
    double initial_distance = 0.0; ///< ||x(0) - X0||
    double final_distance = 0.0;   ///< ||x(t_end) - X0||
    std::optional<double> period;  ///< zero-crossings of y1 - y10 over the last third
    std::optional<double> manifold_period;
    std::string error;
};

/// Comparison against the published values of one reference case.
struct ReferenceComparison {
    int n = 0;
    double x10_rel = 0.0;
    double y10_rel = 0.0;
    double x20_rel = 0.0;
    double y20_rel = 0.0;
    std::optional<std::size_t> matched_candidate; ///< index into the candidate list
    double omega_rel = 0.0;
    double tau_rel = 0.0;
    bool mu2_sign_match = false;
    bool beta2_sign_match = false;
    double mu2_rel = 0.0;
    double beta2_rel = 0.0;
    double T2_rel = 0.0;
};

struct EquilibriumReport {
    Equilibrium eq;
    double poly_residual = 0.0;
    double rhs_norm = 0.0;
    CharCoeffs cc;
    bool routh_hurwitz_stable = false;
    int unstable_roots_at_zero = 0;
    std::vector<DelayCandidate> candidates;
    std::optional<HopfPoint> hopf;
    double hopf_residual = 0.0;
    double hopf_modulus_defect = 0.0;
    double transversality_printed_rel_diff = 0.0;
    std::optional<NormalFormAnalysis> normal_form;
    std::optional<StabilityVerdict> verdict_at_tau;
    std::optional<SimulationSummary> simulation;
    std::optional<ReferenceComparison> reference;
    std::vector<std::string> flags;
    std::vector<std::string> errors;
};

struct CaseReport {
    std::string label;
    ModelParams params;
    std::optional<int> reference_case;
    std::vector<EquilibriumReport> equilibria;
    std::string error;
};

struct AnalysisReport {
    FormulaOptions formulas;
    std::optional<double> tau;
    std::vector<CaseReport> cases;

    [[nodiscard]] bool has_errors() const;
};

using FieldValue = std::variant<double, long, bool, std::string>;

struct ReportField {
    std::string key;
    FieldValue value;
};

/// Every report entry as a flat dotted key, in output order.
[[nodiscard]] std::vector<ReportField> flatten(const AnalysisReport& report);

/// `key = value` text, one field per line, doubles at 17 significant digits.
[[nodiscard]] std::string render_report(const AnalysisReport& report);

[[nodiscard]] std::string format_double(double v);

} // namespace p53hopf
