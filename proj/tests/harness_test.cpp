#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "blackbox/error.hpp"
#include "blackbox/harness.hpp"

using namespace blackbox;
using namespace blackbox::harness;
using nlohmann::json;

namespace {

json base(const char* scenario, std::uint64_t seed = 1) {
    return json{{"schema_version", 1}, {"scenario", scenario}, {"seed", seed}};
}

std::vector<json> lines(const std::string& text) {
    std::vector<json> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(json::parse(line));
    return out;
}

const InvariantResult* find(const Report& r, const std::string& name) {
    for (const auto& i : r.invariants) {
        if (i.name == name) return &i;
    }
    return nullptr;
}

}  // namespace

TEST(Config, RejectsSchemaProblems) {
    EXPECT_THROW(parse_config(json::array()), ConfigError);
    auto doc = base("S6_landauer_ledger");
    doc["schema_version"] = 2;
    EXPECT_THROW(parse_config(doc), ConfigError);
    EXPECT_THROW(parse_config(base("S7_nothing")), ConfigError);

    doc = base("S6_landauer_ledger");
    doc["box"] = {{"kind", "stochastic"}, {"p", {0.5}}};
    doc["extra"] = 1;
    EXPECT_THROW(parse_config(doc), ConfigError);

    doc.erase("extra");
    doc["observer"] = {{"temperature", 300}};  // misspelled key
    EXPECT_THROW(parse_config(doc), ConfigError);

    doc["observer"] = json::object();
    doc["quantum"] = json::object();  // section not bound to S6
    EXPECT_THROW(parse_config(doc), ConfigError);

    doc.erase("quantum");
    EXPECT_NO_THROW(parse_config(doc));
}

TEST(Config, BadBoxSpecsSurfaceAsConfigErrors) {
    auto doc = base("S1_underdetermination");
    doc["box"] = {{"kind", "fsm"}, {"n", 1}, {"initial", 0}, {"states", {{{"id", 0}, {"output", "0"}, {"next", 3}}}}};
    EXPECT_THROW(parse_config(doc), ConfigError);
    doc["box"] = {{"kind", "stochastic"}, {"p", {1.5}}};
    EXPECT_THROW(parse_config(doc), ConfigError);
}

TEST(Config, SectionsAreCheckedBeforeRunning) {
    auto s2 = base("S2_trap_theorem1");
    s2["trap"] = {{"N", 3}, {"mode", "random"}};
    EXPECT_THROW(parse_config(s2), ConfigError);
    auto s3 = base("S3_concat_theorem2");
    s3["box"] = {{"kind", "stochastic"}, {"p", {0.5}}};
    EXPECT_THROW(parse_config(s3), ConfigError);  // white missing
    s3["white"] = {{"initial", 0}, {"states", {{{"id", 0}, {"output", "01"}, {"next", 0}}}}};
    s3["observer"] = {{"n", 3}};
    EXPECT_NO_THROW(parse_config(s3));
    s3["observer"] = {{"n", 1}};
    EXPECT_THROW(parse_config(s3), ConfigError);
    auto s4 = base("S4_two_observers");
    s4["inference"] = {{"groups", {{0}, {0}}}};
    EXPECT_THROW(parse_config(s4), ConfigError);
    s4["inference"] = {{"groups", {{0}, {1}}}};
    s4["observer"] = {{"n", 2}};
    EXPECT_THROW(parse_config(s4), ConfigError);
}

TEST(S1, ExhaustedBudgetStillReports) {
    auto doc = base("S1_underdetermination");
    doc["box"] = {{"kind", "stochastic"}, {"p", {0.5}}};
    doc["observer"] = {{"max_energy_joules", 0.0}};
    const auto r = run_scenario(parse_config(doc));
    EXPECT_TRUE(r.steps.empty());
    EXPECT_TRUE(r.verdicts["energy_budget_exhausted"].get<bool>());
    EXPECT_TRUE(r.verdicts["provisional_table"].is_null());
    EXPECT_TRUE(r.passed());
}

TEST(Config, SeedOverrideKeepsDocumentInSync) {
    auto doc = base("S6_landauer_ledger", 3);
    doc["box"] = {{"kind", "stochastic"}, {"p", {0.5}}};
    const auto cfg = with_seed(parse_config(doc), 44);
    EXPECT_EQ(cfg.seed, 44u);
    EXPECT_EQ(cfg.document["seed"], 44);
}

TEST(Scenarios, AllListed) {
    EXPECT_EQ(list_scenarios().size(), 6u);
    for (const auto& s : list_scenarios()) EXPECT_EQ(parse_scenario_id(to_string(s.id)), s.id);
}

TEST(S1, AlternatorPrefixIsUnderdetermined) {
    auto doc = base("S1_underdetermination");
    doc["box"] = {{"kind", "fsm"},
                  {"n", 1},
                  {"initial", 0},
                  {"states", {{{"id", 0}, {"output", "0"}, {"next", 1}}, {{"id", 1}, {"output", "1"}, {"next", 0}}}}};
    doc["run"] = {{"length", 4}};
    const auto r = run_scenario(parse_config(doc));
    EXPECT_TRUE(r.passed());
    EXPECT_EQ(r.verdicts["hypothesis_count"], 1);  // s_max = 3 admits only the alternator
    EXPECT_EQ(r.verdicts["divergent_extensions"].size(), 1u);

    doc["inference"] = {{"s_max", 4}};
    const auto wider = run_scenario(parse_config(doc));
    EXPECT_TRUE(wider.passed());
    EXPECT_GE(wider.verdicts["hypothesis_count"].get<std::size_t>(), 2u);
}

TEST(S2, ViolationAtStep101) {
    auto doc = base("S2_trap_theorem1", 9);
    doc["trap"] = {{"N", 100}};
    const auto r = run_scenario(parse_config(doc));
    EXPECT_TRUE(r.passed());
    EXPECT_EQ(r.verdicts["violation_step"], 101);
    EXPECT_GE(r.verdicts["resample_attempts"].get<int>(), 1);
    EXPECT_EQ(r.steps.size(), 101u);
}

TEST(S2, ZeroTriggerHasItsOwnCode) {
    auto doc = base("S2_trap_theorem1");
    doc["trap"] = {{"N", 0}};
    try {
        run_scenario(parse_config(doc));
        FAIL() << "expected a precondition failure";
    } catch (const ScenarioPrecondition& e) {
        EXPECT_EQ(e.code(), "S2_ZERO_TRIGGER");
    }
}

TEST(S3, ColumnStrippingMatches) {
    auto doc = base("S3_concat_theorem2");
    doc["box"] = {{"kind", "fsm"},
                  {"n", 1},
                  {"initial", 0},
                  {"states", {{{"id", 0}, {"output", "1"}, {"next", 1}}, {{"id", 1}, {"output", "0"}, {"next", 0}}}}};
    doc["white"] = {{"initial", 0}, {"states", {{{"id", 0}, {"output", "11"}, {"next", 0}}}}};
    const auto r = run_scenario(parse_config(doc));
    EXPECT_TRUE(r.passed());
    EXPECT_EQ(r.verdicts["composite_width"], 3);
}

TEST(S4, MarginalsBlindJointCorrelated) {
    auto doc = base("S4_two_observers", 4);
    const auto r = run_scenario(parse_config(doc));
    EXPECT_TRUE(r.passed());
    const auto& joint = r.verdicts["joint"];
    EXPECT_EQ(joint["verdict"], "dependent");
    EXPECT_NEAR(joint["g_statistic"].get<double>() / (2 * 1000 * std::numbers::ln2), 1.0, 0.05);
    for (const auto& m : r.verdicts["marginals"]) EXPECT_NE(m["lag1_independence"]["verdict"], "dependent");
}

TEST(S5, PipelineDiagnosticsForBothVariants) {
    for (const char* variant : {"normalized_phase", "paper_literal"}) {
        auto doc = base("S5_quantum_pipeline", 5);
        doc["box"] = {{"kind", "stochastic"}, {"p", {0.3, 0.6}}};
        doc["run"] = {{"length", 100}};
        doc["quantum"] = {{"variant", variant}};
        const auto r = run_scenario(parse_config(doc));
        EXPECT_TRUE(r.passed()) << variant;
        ASSERT_EQ(r.steps.size(), 100u);
        EXPECT_EQ(r.steps[0]["observed"].size(), 2u);
        EXPECT_EQ(r.steps[0]["observed"][0].size(), 4u);
        const bool literal = std::string(variant) == "paper_literal";
        EXPECT_EQ(find(r, "unitarity_defect_matches_alpha_formula") != nullptr, literal);
        if (literal) EXPECT_NEAR(r.verdicts["max_unitarity_defect"].get<double>(), 0.5, 1e-12);
    }
}

TEST(S5, PerBitQuantumListMustMatchWidth) {
    auto doc = base("S5_quantum_pipeline");
    doc["box"] = {{"kind", "stochastic"}, {"p", {0.3, 0.6}}};
    doc["quantum"] = json::array({json::object()});
    EXPECT_THROW(parse_config(doc), ConfigError);
    doc["quantum"] = json::array({json::object(), {{"variant", "paper_literal"}}});
    EXPECT_NO_THROW(parse_config(doc));
}

TEST(S6, EnergyTotalForEightBitsAThousandTimes) {
    auto doc = base("S6_landauer_ledger");
    doc["box"] = {{"kind", "stochastic"}, {"p", std::vector<double>(8, 0.5)}};
    const auto r = run_scenario(parse_config(doc));
    EXPECT_TRUE(r.passed());
    EXPECT_NEAR(r.ledger["energy_total_joules"].get<double>(), 8000 * 0.7 * 1.380649e-23 * 300, 1e-30);
    EXPECT_NEAR(r.ledger["energy_total_joules"].get<double>(), 2.32e-17, 0.005e-17);
}

TEST(S6, BudgetStopsTheRunCleanly) {
    auto doc = base("S6_landauer_ledger");
    doc["box"] = {{"kind", "stochastic"}, {"p", {0.5, 0.5}}};
    doc["observer"] = {{"max_energy_joules", 10 * 0.7 * 1.380649e-23 * 300 * (1 + 1e-9)}};
    const auto r = run_scenario(parse_config(doc));
    EXPECT_TRUE(r.passed());
    EXPECT_EQ(r.verdicts["observations_completed"], 5);
    EXPECT_EQ(r.verdicts["energy_budget_exhausted"], true);
}

TEST(Report, ZeroObservationRunIsTrailerOnly) {
    auto doc = base("S6_landauer_ledger");
    doc["box"] = {{"kind", "stochastic"}, {"p", {0.5}}};
    doc["run"] = {{"length", 0}};
    const auto r = run_scenario(parse_config(doc));
    const auto out = lines(emit_report(r, ReportFormat::json_lines));
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0]["type"], "trailer");
    EXPECT_EQ(out[0]["step_count"], 0);
}

TEST(Report, TrailerCarriesRequiredFields) {
    auto doc = base("S2_trap_theorem1", 12);
    doc["trap"] = {{"N", 5}};
    const auto r = run_scenario(parse_config(doc));
    const auto out = lines(emit_report(r, ReportFormat::json_lines));
    const auto& trailer = out.back();
    EXPECT_EQ(trailer["scenario_id"], "S2_trap_theorem1");
    EXPECT_EQ(trailer["seed"], 12);
    EXPECT_EQ(trailer["versions"]["report_schema"], 1);
    for (const auto& inv : trailer["invariants"]) {
        EXPECT_TRUE(inv.contains("name"));
        EXPECT_TRUE(inv["passed"].is_boolean());
    }
    for (std::size_t i = 0; i + 1 < out.size(); ++i) EXPECT_EQ(out[i]["type"], "step");
}

TEST(Report, IdenticalConfigsGiveIdenticalBytes) {
    for (const char* s : {"S2_trap_theorem1", "S4_two_observers"}) {
        const auto cfg = parse_config(base(s, 31));
        const auto a = emit_report(run_scenario(cfg), ReportFormat::json_lines);
        const auto b = emit_report(run_scenario(cfg), ReportFormat::json_lines);
        EXPECT_EQ(a, b);
        EXPECT_EQ(emit_report(run_scenario(cfg), ReportFormat::summary_text),
                  emit_report(run_scenario(cfg), ReportFormat::summary_text));
    }
}

TEST(Report, UnwritablePathIsAnOutputError) {
    const auto r = run_scenario(parse_config(base("S4_two_observers")));
    EXPECT_THROW(write_report(r, ReportFormat::json_lines, "/nonexistent-dir/x/report.jsonl"), OutputError);
}

TEST(Report, FormatNames) {
    EXPECT_EQ(parse_format("json-lines"), ReportFormat::json_lines);
    EXPECT_EQ(parse_format("summary-text"), ReportFormat::summary_text);
    EXPECT_THROW(parse_format("xml"), ConfigError);
}
