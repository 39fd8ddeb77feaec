#include "p53hopf/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "p53hopf/errors.hpp"

namespace p53hopf {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    double out = 0.0;
    const char* begin = value.data();
    const char* end = begin + value.size();
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc{} || ptr != end || !std::isfinite(out)) {
        throw ConfigError(fmt::format("{}: '{}' is not a finite number", key, value));
    }
    return out;
}

long parse_integer(const std::string& key, const std::string& value) {
    long out = 0;
    const char* begin = value.data();
    const char* end = begin + value.size();
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError(fmt::format("{}: '{}' is not an integer", key, value));
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") {
        return true;
    }
    if (value == "false" || value == "0" || value == "no" || value == "off") {
        return false;
    }
    throw ConfigError(fmt::format("{}: '{}' is not a boolean", key, value));
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= value.size()) {
        const auto comma = value.find(',', start);
        const auto item = std::string(trim(std::string_view(value).substr(start, comma - start)));
        if (!item.empty()) {
            out.push_back(parse_double(key, item));
        }
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    if (out.empty()) {
        throw ConfigError(key + ": empty list");
    }
    return out;
}

std::optional<int> reference_exponent(std::string_view name) {
    if (name == "n2") {
        return 2;
    }
    if (name == "n4") {
        return 4;
    }
    if (name == "n163") {
        return 163;
    }
    if (name == "n164") {
        return 164;
    }
    return std::nullopt;
}

void set_model_param(ModelParams& p, const std::string& name, double value, const std::string& key) {
    if (name == "a1") {
        p.a1 = value;
    } else if (name == "a2") {
        p.a2 = value;
    } else if (name == "a12") {
        p.a12 = value;
    } else if (name == "a21") {
        p.a21 = value;
    } else if (name == "b1") {
        p.b1 = value;
    } else if (name == "b2") {
        p.b2 = value;
    } else if (name == "a") {
        p.a = value;
    } else if (name == "n") {
        if (value != std::round(value)) {
            throw ConfigError(fmt::format("{}: Hill exponent must be an integer", key));
        }
        p.n = static_cast<int>(value);
    } else {
        throw ConfigError(fmt::format("{}: unknown model parameter '{}'", key, name));
    }
}

} // namespace

std::map<std::string, std::string> parse_key_values(std::string_view text) {
    std::map<std::string, std::string> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (!line.empty()) {
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) {
                throw ConfigError(fmt::format("line {}: expected 'key = value'", line_no));
            }
            const auto key = std::string(trim(line.substr(0, eq)));
            const auto value = std::string(trim(line.substr(eq + 1)));
            if (key.empty()) {
                throw ConfigError(fmt::format("line {}: empty key", line_no));
            }
            if (!out.emplace(key, value).second) {
                throw ConfigError(fmt::format("line {}: duplicate key '{}'", line_no, key));
            }
        }
        if (nl == std::string_view::npos) {
            break;
        }
        pos = nl + 1;
    }
    return out;
}

AnalysisConfig reference_preset(std::string_view name) {
    const auto n = reference_exponent(name);
    if (!n) {
        throw ConfigError(fmt::format("unknown reference case '{}' (expected n2, n4, n163 or n164)", name));
    }
    AnalysisConfig cfg;
    cfg.label = std::string(name);
    cfg.params = ModelParams{0.13, 0.13, 0.02, 0.02, 0.8, 0.01, 4.0, *n};
    cfg.reference_case = *n;
    return cfg;
}

AnalysisConfig apply_config(AnalysisConfig cfg, const std::map<std::string, std::string>& kv) {
    std::optional<double> sweep_from;
    std::optional<double> sweep_to;
    std::optional<long> sweep_count;
    for (const auto& [key, value] : kv) {
        if (key.rfind("model.", 0) == 0) {
            set_model_param(cfg.params, key.substr(6), parse_double(key, value), key);
        } else if (key == "label") {
            cfg.label = value;
        } else if (key == "tau") {
            cfg.tau = parse_double(key, value);
        } else if (key == "k_max") {
            cfg.k_max = static_cast<int>(parse_integer(key, value));
        } else if (key == "out") {
            cfg.out_dir = value;
        } else if (key == "workers") {
            cfg.workers = static_cast<std::size_t>(std::max(1L, parse_integer(key, value)));
        } else if (key == "reference.case") {
            if (value == "none") {
                cfg.reference_case.reset();
            } else if (const auto n = reference_exponent(value)) {
                cfg.reference_case = n;
            } else {
                throw ConfigError(fmt::format("{}: unknown reference case '{}'", key, value));
            }
        } else if (key == "sweep.param") {
            if (!cfg.sweep) {
                cfg.sweep.emplace();
            }
            cfg.sweep->param = value;
        } else if (key == "sweep.values") {
            if (!cfg.sweep) {
                cfg.sweep.emplace();
            }
            cfg.sweep->values = parse_list(key, value);
        } else if (key == "sweep.from") {
            sweep_from = parse_double(key, value);
        } else if (key == "sweep.to") {
            sweep_to = parse_double(key, value);
        } else if (key == "sweep.count") {
            sweep_count = parse_integer(key, value);
        } else if (key == "sim.enabled") {
            cfg.sim.enabled = parse_bool(key, value);
        } else if (key == "sim.tau") {
            cfg.sim.tau = parse_double(key, value);
        } else if (key == "sim.tau_factor") {
            cfg.sim.tau_factor = parse_double(key, value);
        } else if (key == "sim.t_end") {
            cfg.sim.t_end = parse_double(key, value);
        } else if (key == "sim.step") {
            cfg.sim.step = parse_double(key, value);
        } else if (key == "sim.steps_per_delay") {
            const long m = parse_integer(key, value);
            if (m < 1) {
                throw ConfigError(key + ": must be at least 1");
            }
            cfg.sim.steps_per_delay = static_cast<std::size_t>(m);
        } else if (key == "sim.perturbation") {
            cfg.sim.perturbation = parse_double(key, value);
        } else if (key == "sim.stride") {
            const long s = parse_integer(key, value);
            if (s < 1) {
                throw ConfigError(key + ": must be at least 1");
            }
            cfg.sim.stride = static_cast<std::size_t>(s);
        } else if (key == "manifold.z0") {
            cfg.sim.manifold_z0 = parse_double(key, value);
        } else if (key == "formula.literal_f4_11") {
            cfg.formulas.literal_f4_11 = parse_bool(key, value);
        } else if (key == "formula.literal_f4_02") {
            cfg.formulas.literal_f4_02 = parse_bool(key, value);
        } else if (key == "formula.literal_w20_conj") {
            cfg.formulas.literal_w20_conj = parse_bool(key, value);
        } else if (key == "formula.literal_f21_args") {
            cfg.formulas.literal_f21_args = parse_bool(key, value);
        } else {
            throw ConfigError(fmt::format("unknown configuration key '{}'", key));
        }
    }
    if (sweep_from || sweep_to || sweep_count) {
        if (!(sweep_from && sweep_to && sweep_count)) {
            throw ConfigError("sweep.from, sweep.to and sweep.count must be given together");
        }
        if (*sweep_count < 1) {
            throw ConfigError("sweep.count must be at least 1");
        }
        if (!cfg.sweep) {
            cfg.sweep.emplace();
        }
        cfg.sweep->values.clear();
        for (long i = 0; i < *sweep_count; ++i) {
            const double frac = *sweep_count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(*sweep_count - 1);
            cfg.sweep->values.push_back(*sweep_from + frac * (*sweep_to - *sweep_from));
        }
    }
    return cfg;
}

AnalysisConfig load_config(const std::string& path, AnalysisConfig base) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(fmt::format("cannot open configuration file '{}'", path));
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return apply_config(std::move(base), parse_key_values(buf.str()));
    } catch (const ConfigError& e) {
        throw ConfigError(fmt::format("{}: {}", path, e.what()));
    }
}

void validate(const AnalysisConfig& cfg) {
    for (const auto& c : expand_cases(cfg)) {
        try {
            validate(c.params);
        } catch (const DomainError& e) {
            throw ConfigError(fmt::format("case {}: {}", c.label, e.what()));
        }
    }
    if (cfg.tau && !(*cfg.tau >= 0.0)) {
        throw ConfigError("tau must be nonnegative");
    }
    if (cfg.k_max < 0) {
        throw ConfigError("k_max must be nonnegative");
    }
    if (cfg.sweep && cfg.sweep->param.empty()) {
        throw ConfigError("sweep.param is required when sweeping");
    }
    if (cfg.sweep && cfg.sweep->values.empty()) {
        throw ConfigError("sweep needs sweep.values or sweep.from/to/count");
    }
    const auto& s = cfg.sim;
    if (s.tau && !(*s.tau > 0.0)) {
        throw ConfigError("sim.tau must be positive");
    }
    if (!(s.tau_factor > 0.0)) {
        throw ConfigError("sim.tau_factor must be positive");
    }
    if (s.t_end && !(*s.t_end > 0.0)) {
        throw ConfigError("sim.t_end must be positive");
    }
    if (s.step && !(*s.step > 0.0)) {
        throw ConfigError("sim.step must be positive");
    }
    if (!(s.perturbation > -1.0)) {
        throw ConfigError("sim.perturbation must exceed -1");
    }
    if (cfg.workers < 1) {
        throw ConfigError("workers must be at least 1");
    }
}

std::vector<CaseSpec> expand_cases(const AnalysisConfig& cfg) {
    if (!cfg.sweep) {
        return {CaseSpec{cfg.label, cfg.params, cfg.reference_case}};
    }
    std::vector<CaseSpec> out;
    for (std::size_t i = 0; i < cfg.sweep->values.size(); ++i) {
        CaseSpec c;
        c.params = cfg.params;
        const double v = cfg.sweep->values[i];
        const std::string key = "sweep.param";
        set_model_param(c.params, cfg.sweep->param, cfg.sweep->param == "n" ? std::round(v) : v, key);
        c.label = fmt::format("{}_{}{}", cfg.label, cfg.sweep->param, i);
        if (cfg.sweep->param == "n") {
            c.label = fmt::format("{}_n{}", cfg.label, c.params.n);
        }
        // A sweep over the Hill exponent from the reference preset compares
        // each published exponent against its own reference values.
        c.reference_case = cfg.reference_case;
        if (cfg.reference_case && cfg.sweep->param == "n") {
            const int n = c.params.n;
            c.reference_case = (n == 2 || n == 4 || n == 163 || n == 164) ? std::optional<int>(n) : std::nullopt;
        } else if (cfg.sweep) {
            c.reference_case.reset();
        }
        out.push_back(std::move(c));
    }
    return out;
}

} // namespace p53hopf
