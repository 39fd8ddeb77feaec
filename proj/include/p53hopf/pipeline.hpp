#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "p53hopf/config.hpp"
#include "p53hopf/report.hpp"
#include "p53hopf/simulation.hpp"

namespace p53hopf {

/// Published values for one of the four reference presets.
struct PublishedCase {
    int n = 0;
    double x10 = 0.0;
    double y10 = 0.0;
    double x20 = 0.0;
    double y20 = 0.0;
    double mu2 = 0.0;
    double beta2 = 0.0;
    double T2 = 0.0;
    double omega = 0.0;
    double tau = 0.0;
    bool text_says_period_increasing = true;
};

[[nodiscard]] std::optional<PublishedCase> published_case(int n);

/// Data files belonging to one (case, equilibrium) run. `stem` is the file prefix.
struct RunData {
    std::string stem;
    std::optional<Trajectory> simulated;
    std::optional<Trajectory> manifold;
};

struct AnalysisResult {
    AnalysisReport report;
    std::vector<RunData> runs;
};

/// Full pipeline for one equilibrium. Stage failures land in `errors`.
[[nodiscard]] EquilibriumReport analyze_equilibrium(const ModelParams& p, const Equilibrium& eq,
                                                    const AnalysisConfig& cfg, std::optional<int> reference_case,
                                                    RunData* data = nullptr);

[[nodiscard]] CaseReport analyze_case(const CaseSpec& spec, const AnalysisConfig& cfg, std::vector<RunData>* data);

/// Runs every case of the config, up to cfg.workers at a time. Output order follows the case order.
[[nodiscard]] AnalysisResult run_analysis(const AnalysisConfig& cfg);

/// report.txt plus <stem>_trajectory.csv, <stem>_phase.csv and <stem>_manifold.csv per run.
void emit_outputs(const AnalysisReport& report, const std::vector<RunData>& runs, const std::filesystem::path& outdir);

[[nodiscard]] std::string trajectory_csv(const Trajectory& tr);
[[nodiscard]] std::string phase_csv(const Trajectory& tr);

} // namespace p53hopf
