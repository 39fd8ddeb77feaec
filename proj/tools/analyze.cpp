// analyze: Hopf bifurcation analysis of the delayed P53-MDM2 model.
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "p53hopf/config.hpp"
#include "p53hopf/errors.hpp"
#include "p53hopf/pipeline.hpp"

namespace {

enum ExitCode { kOk = 0, kConfig = 1, kNumerical = 2, kIo = 3 };

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("analyze");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("HOPF_DDE_LOG")) {
        const std::string level = env;
        if (level == "error") {
            spdlog::set_level(spdlog::level::err);
        } else if (level == "info") {
            spdlog::set_level(spdlog::level::info);
        } else if (level == "debug") {
            spdlog::set_level(spdlog::level::debug);
        } else {
            spdlog::warn("ignoring HOPF_DDE_LOG={}, expected error, info or debug", level);
        }
    }
}

} // namespace

int main(int argc, char** argv) {
    setup_logging();

    CLI::App app{"Hopf bifurcation analysis of the delayed P53-MDM2 model"};
    std::string config_path;
    std::string out_dir;
    std::size_t workers = 0;
    std::string paper_case;
    app.add_option("--config", config_path, "key = value configuration file");
    app.add_option("--out", out_dir, "output directory (overrides the config)");
    app.add_option("--workers", workers, "concurrent sweep entries")->check(CLI::PositiveNumber);
    app.add_option("--paper-case", paper_case, "reference preset")
        ->check(CLI::IsMember({"n2", "n4", "n163", "n164"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }
    if (config_path.empty() && paper_case.empty()) {
        std::cerr << "analyze: one of --config or --paper-case is required\n";
        return kConfig;
    }

    p53hopf::AnalysisConfig cfg;
    try {
        if (!paper_case.empty()) {
            cfg = p53hopf::reference_preset(paper_case);
        }
        if (!config_path.empty()) {
            cfg = p53hopf::load_config(config_path, cfg);
        }
        if (!out_dir.empty()) {
            cfg.out_dir = out_dir;
        }
        if (workers > 0) {
            cfg.workers = workers;
        }
        p53hopf::validate(cfg);
    } catch (const p53hopf::IoError& e) {
        std::cerr << "analyze: " << e.what() << '\n';
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "analyze: configuration error: " << e.what() << '\n';
        return kConfig;
    }

    p53hopf::AnalysisResult result;
    try {
        result = p53hopf::run_analysis(cfg);
    } catch (const p53hopf::ConfigError& e) {
        std::cerr << "analyze: configuration error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "analyze: " << e.what() << '\n';
        return kNumerical;
    }

    try {
        p53hopf::emit_outputs(result.report, result.runs, cfg.out_dir);
    } catch (const std::exception& e) {
        std::cerr << "analyze: " << e.what() << '\n';
        return kIo;
    }

    if (result.report.has_errors()) {
        for (const auto& c : result.report.cases) {
            if (!c.error.empty()) {
                spdlog::error("{}: {}", c.label, c.error);
            }
            for (const auto& e : c.equilibria) {
                for (const auto& msg : e.errors) {
                    spdlog::error("{}: {}", c.label, msg);
                }
            }
        }
        return kNumerical;
    }
    std::cout << "wrote " << cfg.out_dir << "/report.txt\n";
    return kOk;
}
