#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace blackbox::harness {

inline constexpr int kSchemaVersion = 1;
inline constexpr std::string_view kLibraryVersion = "0.1.0";

enum class ScenarioId {
    S1_underdetermination,
    S2_trap_theorem1,
    S3_concat_theorem2,
    S4_two_observers,
    S5_quantum_pipeline,
    S6_landauer_ledger,
};

const char* to_string(ScenarioId id) noexcept;
ScenarioId parse_scenario_id(const std::string& text);

struct ScenarioInfo {
    ScenarioId id;
    const char* summary;
};
const std::vector<ScenarioInfo>& list_scenarios();

// Validated scenario configuration. `document` keeps the original JSON so the
// report can echo it; the seed field there is kept in sync with `seed`.
struct ScenarioConfig {
    ScenarioId scenario;
    std::uint64_t seed = 0;
    std::optional<std::string> output;
    nlohmann::json document;
};

// Schema check: version, scenario id, allowed sections and keys. Throws ConfigError.
ScenarioConfig parse_config(const nlohmann::json& document);
ScenarioConfig load_config(const std::filesystem::path& path);
ScenarioConfig with_seed(ScenarioConfig config, std::uint64_t seed);

struct InvariantResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct Report {
    std::string scenario_id;
    std::uint64_t seed = 0;
    nlohmann::json config;
    std::vector<nlohmann::json> steps;
    nlohmann::json verdicts = nlohmann::json::object();
    std::vector<InvariantResult> invariants;
    nlohmann::json ledger = nlohmann::json::object();
    nlohmann::json versions = nlohmann::json::object();

    bool passed() const noexcept;
};

// Executes the pipeline bound to the scenario. Config-level problems (bad box
// specs, scenario preconditions) throw ConfigError or ScenarioPrecondition.
Report run_scenario(const ScenarioConfig& config);

enum class ReportFormat { json_lines, summary_text };
ReportFormat parse_format(const std::string& text);

// json-lines: one {"type":"step"} object per step, then one {"type":"trailer"}.
std::string emit_report(const Report& report, ReportFormat format);
// Throws OutputError when the destination cannot be written.
void write_report(const Report& report, ReportFormat format, const std::filesystem::path& path);

}  // namespace blackbox::harness
