#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "p53hopf/model.hpp"
#include "p53hopf/normal_form.hpp"

namespace p53hopf {

/// Ordered `key = value` pairs from a line-oriented text file. `#` starts a
/// comment; blank lines are ignored; keys may be dotted (`sim.step`).
/// Throws ConfigError with the line number on malformed lines or duplicate keys.
[[nodiscard]] std::map<std::string, std::string> parse_key_values(std::string_view text);

struct SweepSpec {
    std::string param;          ///< a1, a2, a12, a21, b1, b2, a or n
    std::vector<double> values; ///< explicit list, or `count` points on [from, to]
};

struct SimulationSpec {
    bool enabled = true;
    std::optional<double> tau;          ///< explicit simulation delay
    double tau_factor = 1.05;           ///< otherwise tau = tau_factor * tau_c
    std::optional<double> t_end;        ///< default: 50 periods 2 pi / omega_c
    std::size_t steps_per_delay = 64;
    std::optional<double> step;         ///< rounded so that it divides tau
    double perturbation = 0.01;         ///< relative offset of the constant history
    std::optional<std::size_t> stride;  ///< CSV decimation, default keeps <= 10000 rows
    double manifold_z0 = 0.01;          ///< initial |z| of the reduced flow
};

struct AnalysisConfig {
    std::string label = "case";
    ModelParams params;
    std::optional<double> tau;
    std::optional<SweepSpec> sweep;
    SimulationSpec sim;
    FormulaOptions formulas;
    int k_max = 8;
    std::string out_dir = "out";
    std::size_t workers = 1;
    /// Published reference case (Hill exponent 2, 4, 163 or 164) to compare against.
    std::optional<int> reference_case;
};

/// Preset for `--paper-case`: a1 = a2 = 0.13, a12 = a21 = 0.02, b1 = 0.8,
/// b2 = 0.01, a = 4 with the named Hill exponent. Accepts n2, n4, n163, n164.
[[nodiscard]] AnalysisConfig reference_preset(std::string_view name);

/// Applies parsed keys on top of `base`. Unknown keys and out-of-range
/// values raise ConfigError.
[[nodiscard]] AnalysisConfig apply_config(AnalysisConfig base, const std::map<std::string, std::string>& kv);

[[nodiscard]] AnalysisConfig load_config(const std::string& path, AnalysisConfig base = {});

/// Positivity/range checks for the whole configuration (model parameters
/// included). Throws ConfigError.
void validate(const AnalysisConfig& cfg);

/// One concrete parameter set per sweep value (or the base set when no
/// sweep is configured), labelled deterministically.
struct CaseSpec {
    std::string label;
    ModelParams params;
    std::optional<int> reference_case;
};

[[nodiscard]] std::vector<CaseSpec> expand_cases(const AnalysisConfig& cfg);

} // namespace p53hopf
