#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "blackbox/error.hpp"
#include "blackbox/harness.hpp"

namespace {

namespace fs = std::filesystem;
using namespace blackbox;

constexpr int kExitPass = 0;
constexpr int kExitInvariantFailure = 1;
constexpr int kExitConfigError = 2;

// Explicit --output wins, then the config's own "output", then
// $BLACKBOX_OUTPUT_DIR/<scenario>-<seed>.<ext>; with none of those the report
// goes to stdout.
std::optional<fs::path> output_path(const std::string& flag, const harness::ScenarioConfig& cfg,
                                    harness::ReportFormat format) {
    if (!flag.empty()) return flag == "-" ? std::nullopt : std::optional<fs::path>(flag);
    if (cfg.output) return fs::path(*cfg.output);
    if (const char* dir = std::getenv("BLACKBOX_OUTPUT_DIR"); dir && *dir) {
        const char* ext = format == harness::ReportFormat::json_lines ? ".jsonl" : ".txt";
        return fs::path(dir) / (std::string(harness::to_string(cfg.scenario)) + "-" + std::to_string(cfg.seed) + ext);
    }
    return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Black-box observation toolkit: scenario runner"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string output;
    std::string format_text = "json-lines";

    auto* run = app.add_subcommand("run", "run a scenario config and emit its report");
    run->add_option("config", config_path, "scenario config file (JSON)")->required();
    run->add_option("--seed", seed, "override the root seed");
    run->add_option("--output", output, "report destination ('-' for stdout)");
    run->add_option("--format", format_text, "json-lines or summary-text");

    auto* validate = app.add_subcommand("validate", "check a config against the schema");
    validate->add_option("config", config_path, "scenario config file (JSON)")->required();
    validate->add_option("--seed", seed, "override the root seed");

    auto* list = app.add_subcommand("list-scenarios", "print the known scenario ids");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitConfigError;
    }

    if (list->parsed()) {
        for (const auto& info : harness::list_scenarios()) {
            std::cout << harness::to_string(info.id) << '\t' << info.summary << '\n';
        }
        return kExitPass;
    }

    try {
        auto cfg = harness::load_config(config_path);
        if (seed) cfg = harness::with_seed(std::move(cfg), *seed);
        if (validate->parsed()) {
            std::cout << "ok: " << harness::to_string(cfg.scenario) << " (seed " << cfg.seed << ")\n";
            return kExitPass;
        }

        const auto format = harness::parse_format(format_text);
        const auto report = harness::run_scenario(cfg);
        if (const auto path = output_path(output, cfg, format)) {
            if (path->has_parent_path()) fs::create_directories(path->parent_path());
            harness::write_report(report, format, *path);
            std::cerr << harness::to_string(cfg.scenario) << ": " << (report.passed() ? "PASS" : "FAIL")
                      << " -> " << path->string() << '\n';
        } else {
            std::cout << harness::emit_report(report, format);
        }
        return report.passed() ? kExitPass : kExitInvariantFailure;
    } catch (const ScenarioPrecondition& e) {
        std::cerr << "precondition " << e.code() << ": " << e.what() << '\n';
        return kExitConfigError;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const OutputError& e) {
        std::cerr << "output error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "output error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfigError;
    }
}
