#include "blackbox/harness.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "blackbox/box_spec.hpp"
#include "blackbox/boxkit.hpp"
#include "blackbox/error.hpp"
#include "blackbox/inference.hpp"
#include "blackbox/machine.hpp"
#include "blackbox/observer.hpp"
#include "blackbox/quantum.hpp"
#include "blackbox/rng.hpp"

namespace blackbox::harness {

using nlohmann::json;
using namespace json_util;
using blackbox::to_string;

namespace {

struct ScenarioEntry {
    ScenarioId id;
    const char* name;
    const char* summary;
};

const ScenarioEntry kScenarios[] = {
    {ScenarioId::S1_underdetermination, "S1_underdetermination",
     "every consistent machine for a finite trace has a non-equivalent twin that diverges one step later"},
    {ScenarioId::S2_trap_theorem1, "S2_trap_theorem1",
     "a counter-plus-RNG trap emits N copies of <1,0> and then breaks the separation forecast"},
    {ScenarioId::S3_concat_theorem2, "S3_concat_theorem2",
     "appending a white-box degree of freedom adds nothing to the inferred machine table"},
    {ScenarioId::S4_two_observers, "S4_two_observers",
     "two observers on disjoint bit groups of one correlated box each see an independent coin"},
    {ScenarioId::S5_quantum_pipeline, "S5_quantum_pipeline",
     "trace -> POVM -> propagator -> state vectors, with every algebraic diagnostic"},
    {ScenarioId::S6_landauer_ledger, "S6_landauer_ledger", "Landauer energy and action bookkeeping per recorded bit"},
};

constexpr const char* kCommonKeys[] = {"schema_version", "scenario", "seed", "output", "description"};

std::vector<const char*> allowed_sections(ScenarioId id) {
    switch (id) {
        case ScenarioId::S1_underdetermination: return {"box", "observer", "run", "inference"};
        case ScenarioId::S2_trap_theorem1: return {"trap", "observer", "inference"};
        case ScenarioId::S3_concat_theorem2: return {"box", "white", "observer", "run", "inference"};
        case ScenarioId::S4_two_observers: return {"box", "observer", "run", "inference"};
        case ScenarioId::S5_quantum_pipeline: return {"box", "observer", "run", "quantum"};
        case ScenarioId::S6_landauer_ledger: return {"box", "observer", "run"};
    }
    return {};
}

const json kEmpty = json::object();

const json& section(const json& doc, const char* name) {
    auto it = doc.find(name);
    return it == doc.end() ? kEmpty : *it;
}

bool rel_close(double a, double b, double tol) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 || std::abs(a - b) <= tol * scale;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// ---- section readers -------------------------------------------------------

observer::ObserverConfig observer_config(const json& doc, std::size_t default_n) {
    const auto& sec = section(doc, "observer");
    const std::string ctx = "observer";
    require_keys(sec, {"n", "delta_t_seconds", "temperature_kelvin", "max_energy_joules"}, ctx);
    observer::ObserverConfig cfg;
    cfg.n = get_u64_or(sec, "n", default_n, ctx);
    cfg.delta_t = get_double_or(sec, "delta_t_seconds", 1.0, ctx);
    cfg.temperature = get_double_or(sec, "temperature_kelvin", 300.0, ctx);
    if (sec.contains("max_energy_joules")) cfg.max_energy = get_double(sec, "max_energy_joules", ctx);
    return cfg;
}

std::uint64_t run_length(const json& doc, std::uint64_t fallback) {
    const auto& sec = section(doc, "run");
    require_keys(sec, {"length"}, "run");
    return get_u64_or(sec, "length", fallback, "run");
}

boxkit::BoxInstance scenario_box(const json& doc, std::uint64_t seed) {
    return boxkit::box_from_json(require(doc, "box", "config"), derive_seed(seed, "box"));
}

quantum::PhaseFunction phase_function(const json& sec, const char* kind_key, const char* value_key,
                                      const std::string& ctx, const quantum::PhaseFunction& fallback) {
    quantum::PhaseFunction f = fallback;
    if (sec.contains(kind_key)) {
        const auto kind = get_string(sec, kind_key, ctx);
        if (kind == "constant") {
            f.kind = quantum::PhaseKind::constant;
        } else if (kind == "linear") {
            f.kind = quantum::PhaseKind::linear;
        } else {
            throw ConfigError(ctx + ": \"" + kind_key + "\" must be \"constant\" or \"linear\"");
        }
    }
    f.value = get_double_or(sec, value_key, f.value, ctx);
    return f;
}

quantum::PropagatorSpec propagator_spec(const json& sec, double observer_dt, const std::string& ctx) {
    require_keys(sec,
                 {"alpha0", "alpha1", "variant", "phi0_kind", "phi0_value", "phi1_kind", "phi1_value",
                  "delta_t_seconds", "anticorrelation_k_max"},
                 ctx);
    quantum::PropagatorSpec spec;
    spec.alpha0 = get_double_or(sec, "alpha0", spec.alpha0, ctx);
    spec.alpha1 = get_double_or(sec, "alpha1", spec.alpha1, ctx);
    try {
        spec.variant = quantum::parse_variant(get_string_or(sec, "variant", "normalized_phase", ctx));
    } catch (const InvalidArgument& e) {
        throw ConfigError(ctx + ": " + e.what());
    }
    const auto phi0 = phase_function(sec, "phi0_kind", "phi0_value", ctx, {quantum::PhaseKind::constant, 0.25});
    // Default phi1 is the negation of phi0.
    const auto phi1 = phase_function(sec, "phi1_kind", "phi1_value", ctx, {phi0.kind, -phi0.value});
    const double dt = get_double_or(sec, "delta_t_seconds", observer_dt, ctx);
    if (dt != observer_dt) throw ConfigError(ctx + ": delta_t_seconds must match the observer's interval");
    spec.schedule = quantum::PhaseSchedule{phi0, phi1, dt};
    try {
        quantum::make_propagator(spec);
    } catch (const InvalidArgument& e) {
        throw ConfigError(ctx + ": " + e.what());
    }
    return spec;
}

std::vector<quantum::PropagatorSpec> propagator_specs(const json& doc, std::size_t n, double observer_dt) {
    const auto& sec = section(doc, "quantum");
    std::vector<quantum::PropagatorSpec> specs;
    if (sec.is_array()) {
        if (sec.size() != n) throw ConfigError("quantum: per-bit list must have one entry per bit");
        for (std::size_t i = 0; i < n; ++i) {
            specs.push_back(propagator_spec(sec[i], observer_dt, "quantum[" + std::to_string(i) + "]"));
        }
    } else {
        specs.assign(n, propagator_spec(sec, observer_dt, "quantum"));
    }
    return specs;
}

std::uint64_t anticorrelation_k_max(const json& doc, std::uint64_t fallback) {
    const auto& sec = section(doc, "quantum");
    if (sec.is_array()) {
        std::uint64_t k = fallback;
        for (const auto& s : sec) k = std::max(k, get_u64_or(s, "anticorrelation_k_max", fallback, "quantum[]"));
        return k;
    }
    return get_u64_or(sec, "anticorrelation_k_max", fallback, "quantum");
}

inference::Partition partition_from(const json& groups, const std::string& ctx) {
    if (!groups.is_array() || groups.size() != 2) throw ConfigError(ctx + ": \"groups\" must hold two position lists");
    inference::Partition p;
    for (int g = 0; g < 2; ++g) {
        if (!groups[g].is_array()) throw ConfigError(ctx + ": \"groups\" entries must be arrays");
        for (const auto& v : groups[g]) {
            if (!v.is_number_unsigned()) throw ConfigError(ctx + ": bit positions must be non-negative integers");
            (g == 0 ? p.group1 : p.group2).push_back(v.get<std::size_t>());
        }
    }
    return p;
}

// ---- shared pieces ----------------------------------------------------------

json ledger_json(const observer::ObserverState& obs) {
    const auto& l = obs.ledger();
    return json{{"bits_recorded", l.bits_recorded()},
                {"energy_total_joules", l.energy_total()},
                {"action_total_joule_seconds", l.action_total()},
                {"theta_joule_seconds", l.theta()},
                {"temperature_kelvin", l.temperature()},
                {"efficiency", l.efficiency()},
                {"delta_t_seconds", obs.clock().delta_t()},
                {"k", obs.clock().k()},
                {"t_seconds", obs.clock().t()}};
}

json step_record(const Outcome& out, const observer::ObserverState& obs) {
    return json{{"type", "step"}, {"k", out.k}, {"t", obs.clock().t()}, {"bits", to_string(out.bits)}};
}

json verdict_json(const inference::IndependenceVerdict& v) {
    return json{{"verdict", inference::to_string(v.verdict)},
                {"g_statistic", v.g_statistic},
                {"mutual_information_nats", v.mutual_information},
                {"threshold", v.threshold},
                {"significance", v.significance},
                {"dof", v.dof},
                {"sample_count", v.sample_count},
                {"group1", v.partition.group1},
                {"group2", v.partition.group2}};
}

json canonical_list(const std::vector<CanonicalMachine>& machines) {
    json out = json::array();
    for (const auto& m : machines) out.push_back(m.serialize());
    return out;
}

struct ObservedRun {
    observer::ObserverState observer;
    boxkit::BoxInstance box;
    std::vector<json> steps;
    std::vector<boxkit::HiddenStateLabel> hidden;  // simulator-side, never reported
    bool budget_exhausted = false;
};

ObservedRun observe_run(observer::ObserverState obs, boxkit::BoxInstance box, std::uint64_t length,
                        bool log_hidden = false) {
    ObservedRun r{std::move(obs), std::move(box), {}, {}, false};
    for (std::uint64_t i = 0; i < length; ++i) {
        const auto label = log_hidden ? boxkit::SimulationProbe::hidden_state(r.box) : 0;
        try {
            auto [next_obs, next_box, out] = observer::observe(r.observer, r.box);
            r.steps.push_back(step_record(out, next_obs));
            r.observer = std::move(next_obs);
            r.box = std::move(next_box);
        } catch (const EnergyBudgetExhausted&) {
            r.budget_exhausted = true;
            break;
        }
        if (log_hidden) r.hidden.push_back(label);
    }
    return r;
}

void check(Report& report, std::string name, bool passed, std::string detail = {}) {
    report.invariants.push_back({std::move(name), passed, std::move(detail)});
}

// ---- scenarios --------------------------------------------------------------

void run_s1(const ScenarioConfig& cfg, Report& report) {
    const auto& doc = cfg.document;
    const auto& inf = section(doc, "inference");
    require_keys(inf, {"s_max", "window"}, "inference");
    const auto s_max = get_u64_or(inf, "s_max", 3, "inference");
    const auto window = get_u64_or(inf, "window", 1, "inference");
    const auto length = run_length(doc, 8);
    if (window == 0 || window > length) {
        throw ScenarioPrecondition("S1_WINDOW_EXCEEDS_LENGTH", "window must lie in [1, run.length]");
    }

    auto box = scenario_box(doc, cfg.seed);
    auto run = observe_run(observer::ObserverState(observer_config(doc, box.width())), box, length);
    const auto& trace = run.observer.log();
    report.steps = std::move(run.steps);
    report.ledger = ledger_json(run.observer);

    // An exhausted energy budget can leave the trace shorter than the window.
    std::optional<inference::ProvisionalTable> prov;
    if (trace.size() >= window) prov = inference::build_provisional_table(trace, window);
    const auto found = inference::enumerate_consistent_machines(trace, s_max);

    std::vector<CanonicalMachine> base = found.hypotheses;
    const bool used_unrolled = base.empty();
    if (used_unrolled) base.push_back(canonicalize(unrolled_hypothesis(trace)));

    bool sound = true, ext_consistent = true, ext_distinct = true;
    std::set<CanonicalMachine> all(base.begin(), base.end());
    json extensions = json::array();
    for (const auto& h : base) {
        const auto hyp = h.to_hypothesis();
        sound = sound && consistent_with(hyp, trace);
        const auto ext = inference::divergent_extension(hyp, trace.size());
        const auto ext_canon = canonicalize(ext);
        ext_consistent = ext_consistent && consistent_with(ext, trace);
        ext_distinct = ext_distinct && !(ext_canon == h);
        all.insert(ext_canon);
        extensions.push_back({{"base", h.serialize()}, {"extension", ext_canon.serialize()}, {"states", ext.size()}});
    }

    report.verdicts = {{"trace_length", trace.size()},
                       {"s_max", s_max},
                       {"hypotheses", canonical_list(found.hypotheses)},
                       {"hypothesis_count", found.hypotheses.size()},
                       {"enumeration_partial", found.partial},
                       {"enumeration_partial_reason", found.partial_reason},
                       {"base_from_unrolled_trace", used_unrolled},
                       {"divergent_extensions", extensions},
                       {"provisional_table",
                        prov ? json{{"window", window}, {"states", prov->table.states.size()}, {"conflict", prov->conflict}}
                             : json(nullptr)},
                       {"energy_budget_exhausted", run.budget_exhausted}};
    check(report, "consistency_soundness", sound, "every hypothesis replays the observed trace");
    check(report, "divergent_extension_consistent", ext_consistent);
    check(report, "divergent_extension_non_equivalent", ext_distinct);
    check(report, "consistent_set_at_least_two", all.size() >= 2,
          std::to_string(all.size()) + " non-equivalent consistent machines");
}

void run_s2(const ScenarioConfig& cfg, Report& report) {
    const auto& doc = cfg.document;
    const auto& trap = section(doc, "trap");
    require_keys(trap, {"N", "post_mode"}, "trap");
    const auto& inf = section(doc, "inference");
    require_keys(inf, {"significance"}, "inference");
    const auto trigger = get_u64_or(trap, "N", 100, "trap");
    if (trigger == 0) {
        throw ScenarioPrecondition("S2_ZERO_TRIGGER", "S2 needs N >= 1: with no pattern prefix there is nothing to refute");
    }
    boxkit::TrapMode mode;
    try {
        mode = boxkit::parse_trap_mode(get_string_or(trap, "post_mode", "random", "trap"));
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("trap: ") + e.what());
    }
    const double significance = get_double_or(inf, "significance", inference::kDefaultSignificance, "inference");
    if (!(significance > 0.0 && significance < 1.0)) throw ConfigError("inference: significance must lie in (0, 1)");

    auto [box, record] = inference::refute_separability(trigger, significance, derive_seed(cfg.seed, "box"), mode);

    const auto length = mode == boxkit::TrapMode::correlated ? 2 * trigger : trigger + 1;
    auto run = observe_run(observer::ObserverState(observer_config(doc, 2)), box, length);
    report.steps = std::move(run.steps);
    report.ledger = ledger_json(run.observer);

    json verdicts = {{"N", trigger},
                     {"post_mode", boxkit::to_string(mode)},
                     {"predicted", to_string(record.predicted)},
                     {"observed_at_violation", to_string(record.observed)},
                     {"violation_step", record.violation_step ? json(*record.violation_step) : json(nullptr)},
                     {"resample_attempts", record.attempts},
                     {"box_seed", record.box_seed},
                     {"prefix_matches_pattern", record.prefix_matches_pattern}};
    if (record.verdict_first_n) verdicts["verdict_first_n"] = verdict_json(*record.verdict_first_n);
    if (record.verdict_first_2n) verdicts["verdict_first_2n"] = verdict_json(*record.verdict_first_2n);
    report.verdicts = std::move(verdicts);

    // The observer's own log must agree with the refuter's record.
    const auto& log = run.observer.log();
    bool log_agrees = log.size() > trigger && log[trigger].bits == record.observed;
    for (std::size_t k = 0; k < trigger && k < log.size(); ++k) log_agrees = log_agrees && log[k].bits == record.predicted;

    check(report, "prefix_is_pattern", record.prefix_matches_pattern, "outcomes 1..N all equal <1,0>");
    check(report, "violation_at_N_plus_1", record.violation_step == trigger + 1,
          "outcome " + std::to_string(trigger + 1) + " = <" + to_string(record.observed) + ">");
    check(report, "observer_log_matches_record", log_agrees);
    if (mode == boxkit::TrapMode::correlated) {
        const bool first_ok = record.verdict_first_n && record.verdict_first_n->verdict != inference::Verdict::dependent;
        const bool second_ok = record.verdict_first_2n && record.verdict_first_2n->verdict == inference::Verdict::dependent;
        check(report, "first_n_not_dependent", first_ok);
        check(report, "first_2n_dependent", second_ok);
    }
}

void run_s3(const ScenarioConfig& cfg, Report& report) {
    const auto& doc = cfg.document;
    const auto& inf = section(doc, "inference");
    require_keys(inf, {"s_max"}, "inference");
    const auto s_max = get_u64_or(inf, "s_max", 3, "inference");
    const auto length = run_length(doc, 8);

    auto box = scenario_box(doc, cfg.seed);
    const auto white = boxkit::white_dof_from_json(require(doc, "white", "config"));
    const auto composite = boxkit::concat(box, white);
    auto run = observe_run(observer::ObserverState(observer_config(doc, composite.width())), composite, length);
    const auto& trace = run.observer.log();
    report.steps = std::move(run.steps);
    report.ledger = ledger_json(run.observer);

    const auto projected = trace.columns(0, box.width());
    const auto alone = boxkit::run(box, trace.size());
    const auto from_composite = inference::enumerate_consistent_machines(projected, s_max);
    const auto from_box = inference::enumerate_consistent_machines(alone, s_max);
    const auto full = inference::enumerate_consistent_machines(trace, s_max);

    report.verdicts = {{"box_width", box.width()},
                       {"white_width", white.width()},
                       {"composite_width", composite.width()},
                       {"hypotheses_from_composite_columns", canonical_list(from_composite.hypotheses)},
                       {"hypotheses_from_box_alone", canonical_list(from_box.hypotheses)},
                       {"composite_hypothesis_count", full.hypotheses.size()},
                       {"energy_budget_exhausted", run.budget_exhausted}};
    check(report, "projection_identity", projected == alone, "first n columns reproduce the box trace");
    check(report, "hypothesis_sets_equal", from_composite.hypotheses == from_box.hypotheses,
          std::to_string(from_composite.hypotheses.size()) + " vs " + std::to_string(from_box.hypotheses.size()));
}

Trace lagged_pairs(const Trace& trace) {
    Trace out(2 * trace.width());
    for (std::size_t k = 0; k + 1 < trace.size(); ++k) {
        Bits row = trace[k].bits;
        row.insert(row.end(), trace[k + 1].bits.begin(), trace[k + 1].bits.end());
        out.append_bits(std::move(row));
    }
    return out;
}

void run_s4(const ScenarioConfig& cfg, Report& report) {
    const auto& doc = cfg.document;
    const auto& inf = section(doc, "inference");
    require_keys(inf, {"significance", "groups"}, "inference");
    const double significance = get_double_or(inf, "significance", inference::kDefaultSignificance, "inference");
    if (!(significance > 0.0 && significance < 1.0)) throw ConfigError("inference: significance must lie in (0, 1)");
    const auto length = run_length(doc, 1000);
    if (length < 2) throw ScenarioPrecondition("S4_SHORT_RUN", "S4 needs run.length >= 2 for lagged marginal tests");

    // Default: one fair bit duplicated onto both positions.
    auto box = doc.contains("box") ? scenario_box(doc, cfg.seed)
                                   : boxkit::make_trap_box(0, 2, boxkit::TrapMode::correlated, derive_seed(cfg.seed, "box"));
    const auto partition = inf.contains("groups") ? partition_from(inf["groups"], "inference")
                                                  : inference::Partition{{0}, {1}};
    try {
        partition.validate(box.width());
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("inference: ") + e.what());
    }

    auto base_cfg = observer_config(doc, 1);
    std::vector<observer::ObserverState> observers;
    for (const auto* group : {&partition.group1, &partition.group2}) {
        auto c = base_cfg;
        c.n = group->size();
        observers.emplace_back(c);
    }

    // The harness steps the box and hands each observer only its own columns;
    // observers share no API surface.
    Trace joint(box.width());
    for (std::uint64_t i = 0; i < length; ++i) {
        auto [next, out] = boxkit::step(box);
        box = std::move(next);
        json step = {{"type", "step"}, {"k", i + 1}, {"bits", to_string(out.bits)}};
        bool exhausted = false;
        for (std::size_t o = 0; o < 2; ++o) {
            const auto& group = o == 0 ? partition.group1 : partition.group2;
            Bits view;
            for (auto p : group) view.push_back(out.bits[p]);
            try {
                observers[o] = std::move(observers[o]).recorded(view);
            } catch (const EnergyBudgetExhausted&) {
                exhausted = true;
                break;
            }
            step["observer_" + std::to_string(o + 1)] = to_string(view);
        }
        if (exhausted) break;
        step["t"] = observers[0].clock().t();
        joint.append_bits(out.bits);
        report.steps.push_back(std::move(step));
    }

    json marginals = json::array();
    for (std::size_t o = 0; o < 2; ++o) {
        const auto& log = observers[o].log();
        json fits = json::array();
        for (std::size_t i = 0; i < log.width(); ++i) {
            const auto fit = quantum::born_fit(log, i);
            fits.push_back({{"alpha1_sq", fit.alpha1_sq}, {"halfwidth", fit.confidence_halfwidth}});
        }
        std::vector<std::size_t> now(log.width()), later(log.width());
        for (std::size_t i = 0; i < log.width(); ++i) {
            now[i] = i;
            later[i] = log.width() + i;
        }
        const auto lag = inference::independence_test(lagged_pairs(log), {now, later}, significance);
        const std::string name = "observer_" + std::to_string(o + 1);
        marginals.push_back({{"observer", name},
                             {"outcomes", log.size()},
                             {"coin_hypothesis", {{"kind", "stochastic"}, {"p", fits}}},
                             {"lag1_independence", verdict_json(lag)}});
        check(report, name + "_marginal_not_dependent", lag.verdict != inference::Verdict::dependent,
              std::string("lag-1 verdict ") + inference::to_string(lag.verdict));
        report.ledger[name] = ledger_json(observers[o]);
    }

    const auto joint_verdict = inference::independence_test(joint, partition, significance);
    const double bound = 2.0 * static_cast<double>(joint.size()) * std::numbers::ln2;
    report.verdicts = {{"marginals", marginals},
                       {"joint", verdict_json(joint_verdict)},
                       {"joint_g_over_2N_ln2", joint_verdict.g_statistic / bound},
                       {"shared_channel", false}};
    check(report, "joint_dependent", joint_verdict.verdict == inference::Verdict::dependent,
          "g = " + fmt(joint_verdict.g_statistic) + ", threshold " + fmt(joint_verdict.threshold));
}

void run_s5(const ScenarioConfig& cfg, Report& report) {
    const auto& doc = cfg.document;
    const auto length = run_length(doc, 64);
    auto box = scenario_box(doc, cfg.seed);
    const auto obs_cfg = observer_config(doc, box.width());
    const auto specs = propagator_specs(doc, box.width(), obs_cfg.delta_t);
    const auto k_max = anticorrelation_k_max(doc, std::max<std::uint64_t>(length, 1));

    auto run = observe_run(observer::ObserverState(obs_cfg), box, length, true);
    const auto& trace = run.observer.log();
    report.ledger = ledger_json(run.observer);

    // POVMs from the simulator's ground-truth state log.
    const quantum::HiddenStateSet states(run.hidden.begin(), run.hidden.end());
    bool orthogonal = true, resolves = true, operators_ok = true;
    std::string povm_detail;
    json povms = json::array();
    for (std::size_t i = 0; i < trace.width(); ++i) {
        try {
            const auto povm = quantum::build_povm(trace, i, states, run.hidden);
            const auto diag = quantum::povm_diagnostics(povm, states);
            orthogonal = orthogonal && diag.orthogonal;
            resolves = resolves && diag.resolves_identity;
            if (states.size() <= 256) {
                const auto [e0, e1] = quantum::povm_operators(povm, states);
                const auto dim = static_cast<Eigen::Index>(states.size());
                operators_ok = operators_ok && (e0 * e1).isZero(0.0) &&
                               (e0 + e1).isApprox(Eigen::MatrixXd::Identity(dim, dim));
            }
            povms.push_back({{"bit", i},
                             {"domain0_size", povm.domain0.size()},
                             {"domain1_size", povm.domain1.size()},
                             {"orthogonal", diag.orthogonal},
                             {"resolves_identity", diag.resolves_identity}});
        } catch (const StateAliasing& e) {
            orthogonal = resolves = false;
            povm_detail = e.what();
            povms.push_back({{"bit", i}, {"error", "state-aliasing"}, {"detail", e.what()}});
        }
    }

    std::vector<quantum::Propagator> props;
    for (const auto& s : specs) props.push_back(quantum::make_propagator(s));
    const auto encoded = quantum::encode_trace(trace, specs);

    double worst_norm = 0.0, worst_defect_gap = 0.0, worst_defect = 0.0;
    for (std::size_t idx = 0; idx < encoded.size(); ++idx) {
        const auto& tick = encoded[idx];
        json step = run.steps[idx];
        json observed = json::array(), unobserved = json::array(), norms = json::array(), defects = json::array();
        for (std::size_t i = 0; i < tick.observed.pairs.size(); ++i) {
            const auto& p = tick.observed.pairs[i];
            const auto& u = tick.unobserved.pairs[i];
            observed.push_back({p.a0.real(), p.a0.imag(), p.a1.real(), p.a1.imag()});
            unobserved.push_back({u.a0.real(), u.a0.imag(), u.a1.real(), u.a1.imag()});
            norms.push_back(p.norm_squared());
            const double defect = quantum::unitarity_defect(props[i], static_cast<std::int64_t>(tick.k));
            defects.push_back(defect);
            const auto& spec = specs[i];
            const double expected = spec.variant == quantum::PropagatorVariant::normalized_phase
                                        ? 0.0
                                        : std::max(std::abs(spec.alpha0 * spec.alpha0 - 1.0),
                                                   std::abs(spec.alpha1 * spec.alpha1 - 1.0));
            worst_defect = std::max(worst_defect, defect);
            worst_defect_gap = std::max(worst_defect_gap, std::abs(defect - expected));
        }
        worst_norm = std::max({worst_norm, tick.observed.max_normalization_error(),
                               tick.unobserved.max_normalization_error()});
        step["observed"] = std::move(observed);
        step["unobserved"] = std::move(unobserved);
        step["pair_norms"] = std::move(norms);
        step["global_norm"] = tick.observed.global_norm();
        step["unitarity_defect"] = std::move(defects);
        report.steps.push_back(std::move(step));
    }

    bool anticorrelated = true;
    json born = json::array();
    bool born_sum = true;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        anticorrelated = anticorrelated && quantum::phase_anticorrelation_check(specs[i].schedule, k_max);
        if (!trace.empty()) {
            const auto fit = quantum::born_fit(trace, i);
            born_sum = born_sum && fit.alpha0_sq + fit.alpha1_sq == 1.0;
            born.push_back({{"bit", i},
                            {"alpha0_sq", fit.alpha0_sq},
                            {"alpha1_sq", fit.alpha1_sq},
                            {"halfwidth", fit.confidence_halfwidth}});
        }
    }
    const auto reversal = quantum::time_reversal_check(trace, specs);

    const bool all_normalized = std::all_of(specs.begin(), specs.end(), [](const auto& s) {
        return s.variant == quantum::PropagatorVariant::normalized_phase;
    });
    report.verdicts = {{"hidden_state_count", states.size()},
                       {"povms", povms},
                       {"born_fit", born},
                       {"max_normalization_error", worst_norm},
                       {"max_unitarity_defect", worst_defect},
                       {"max_defect_formula_gap", worst_defect_gap},
                       {"hilbert_dimension", 2 * trace.width()},
                       {"anticorrelation_k_max", k_max},
                       {"time_reversal",
                        {{"reversed_consistent", reversal.reversed_consistent},
                         {"reversed_hypothesis_size", reversal.reversed_hypothesis_size},
                         {"roundtrip_error", reversal.roundtrip_error}}},
                       {"energy_budget_exhausted", run.budget_exhausted}};

    check(report, "povm_orthogonal", orthogonal, povm_detail);
    check(report, "povm_resolves_identity", resolves, povm_detail);
    check(report, "povm_operator_algebra", operators_ok, "E0 E1 = 0 and E0 + E1 = I");
    check(report, "state_normalization", worst_norm <= quantum::kAlgebraicTolerance, "max error " + fmt(worst_norm));
    if (all_normalized) {
        check(report, "unitarity_defect_normalized_phase", worst_defect <= quantum::kAlgebraicTolerance,
              "max defect " + fmt(worst_defect));
    } else {
        check(report, "unitarity_defect_matches_alpha_formula", worst_defect_gap <= quantum::kAlgebraicTolerance,
              "max |defect - max(|a0^2-1|,|a1^2-1|)| = " + fmt(worst_defect_gap));
    }
    check(report, "phase_anticorrelation", anticorrelated, "k <= " + std::to_string(k_max));
    check(report, "born_probabilities_sum_to_one", born_sum);
    check(report, "time_reversal", reversal.passed(), "roundtrip error " + fmt(reversal.roundtrip_error));
}

void run_s6(const ScenarioConfig& cfg, Report& report) {
    const auto& doc = cfg.document;
    const auto length = run_length(doc, 1000);
    auto box = scenario_box(doc, cfg.seed);
    const auto obs_cfg = observer_config(doc, box.width());
    auto run = observe_run(observer::ObserverState(obs_cfg), box, length);
    report.steps = std::move(run.steps);
    report.ledger = ledger_json(run.observer);

    const auto& obs = run.observer;
    const auto& ledger = obs.ledger();
    const auto m = obs.clock().k();
    const auto expected = observer::landauer_action(static_cast<double>(ledger.bits_recorded()), obs_cfg.temperature,
                                                    obs_cfg.delta_t);
    const double per_bit_theta = observer::landauer_action(1.0, obs_cfg.temperature, obs_cfg.delta_t).action;
    const double t_back = observer::observer_temperature(ledger.theta(), obs_cfg.delta_t);

    report.verdicts = {{"observations_completed", m},
                       {"energy_budget_exhausted", run.budget_exhausted},
                       {"expected_energy_joules", expected.energy},
                       {"expected_action_joule_seconds", expected.action},
                       {"recovered_temperature_kelvin", t_back}};
    check(report, "ledger_linearity", rel_close(ledger.energy_total(), expected.energy, 1e-12),
          fmt(ledger.energy_total()) + " J vs " + fmt(expected.energy) + " J");
    check(report, "action_total", rel_close(ledger.action_total(), expected.action, 1e-12));
    check(report, "clock_consistency", obs.clock().t() == static_cast<double>(m) * obs_cfg.delta_t);
    check(report, "bits_recorded_equals_n_times_k", ledger.bits_recorded() == obs.width() * m && obs.log().size() == m);
    check(report, "theta_matches_formula", rel_close(ledger.theta(), per_bit_theta, 1e-12));
    check(report, "temperature_roundtrip", rel_close(t_back, obs_cfg.temperature, 1e-9),
          fmt(t_back) + " K vs " + fmt(obs_cfg.temperature) + " K");
}

}  // namespace

const char* to_string(ScenarioId id) noexcept {
    for (const auto& e : kScenarios) {
        if (e.id == id) return e.name;
    }
    return "unknown";
}

ScenarioId parse_scenario_id(const std::string& text) {
    for (const auto& e : kScenarios) {
        if (text == e.name) return e.id;
    }
    throw ConfigError("unknown scenario \"" + text + "\"");
}

const std::vector<ScenarioInfo>& list_scenarios() {
    static const std::vector<ScenarioInfo> list = [] {
        std::vector<ScenarioInfo> out;
        for (const auto& e : kScenarios) out.push_back({e.id, e.summary});
        return out;
    }();
    return list;
}

ScenarioConfig parse_config(const json& document) {
    if (!document.is_object()) throw ConfigError("config: expected a JSON object");
    const auto version = get_u64(document, "schema_version", "config");
    if (version != static_cast<std::uint64_t>(kSchemaVersion)) {
        throw ConfigError("config: unsupported schema_version " + std::to_string(version));
    }
    ScenarioConfig cfg;
    cfg.scenario = parse_scenario_id(get_string(document, "scenario", "config"));
    cfg.seed = get_u64(document, "seed", "config");
    if (document.contains("output")) cfg.output = get_string(document, "output", "config");
    if (document.contains("description")) get_string(document, "description", "config");

    const auto sections = allowed_sections(cfg.scenario);
    for (const auto& item : document.items()) {
        bool known = false;
        for (const char* k : kCommonKeys) known = known || item.key() == k;
        for (const char* k : sections) known = known || item.key() == k;
        if (!known) {
            throw ConfigError("config: key \"" + item.key() + "\" is not valid for " + to_string(cfg.scenario));
        }
    }
    cfg.document = document;

    // Check every section now so `validate` catches what `run` would.
    try {
        const bool needs_box = cfg.scenario != ScenarioId::S2_trap_theorem1 && cfg.scenario != ScenarioId::S4_two_observers;
        if (needs_box) require(document, "box", "config");
        if (cfg.scenario == ScenarioId::S3_concat_theorem2) require(document, "white", "config");
        std::size_t n = 2;
        if (document.contains("box")) n = boxkit::box_from_json(document["box"], derive_seed(cfg.seed, "box")).width();
        if (document.contains("white")) n += boxkit::white_dof_from_json(document["white"]).width();
        const auto obs = observer_config(document, n);
        observer::ObserverState probe(obs);
        if (cfg.scenario == ScenarioId::S4_two_observers && section(document, "observer").contains("n")) {
            throw ConfigError("observer: S4 sizes each observer from its bit group; drop \"n\"");
        }
        if (cfg.scenario != ScenarioId::S4_two_observers && obs.n != n) throw ConfigError("observer: n = " + std::to_string(obs.n) + " but the box emits " + std::to_string(n) + " bits");
        run_length(document, 0);
        const auto& inf = section(document, "inference");
        switch (cfg.scenario) {
            case ScenarioId::S1_underdetermination: require_keys(inf, {"s_max", "window"}, "inference"); break;
            case ScenarioId::S2_trap_theorem1:
                require_keys(section(document, "trap"), {"N", "post_mode"}, "trap");
                require_keys(inf, {"significance"}, "inference");
                break;
            case ScenarioId::S3_concat_theorem2: require_keys(inf, {"s_max"}, "inference"); break;
            case ScenarioId::S4_two_observers:
                require_keys(inf, {"significance", "groups"}, "inference");
                if (inf.contains("groups")) partition_from(inf["groups"], "inference").validate(n);
                break;
            case ScenarioId::S5_quantum_pipeline:
                propagator_specs(document, n, obs.delta_t);
                anticorrelation_k_max(document, 1);
                break;
            case ScenarioId::S6_landauer_ledger: break;
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const Error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_config(doc);
}

ScenarioConfig with_seed(ScenarioConfig config, std::uint64_t seed) {
    config.seed = seed;
    config.document["seed"] = seed;
    return config;
}

bool Report::passed() const noexcept {
    return std::all_of(invariants.begin(), invariants.end(), [](const auto& i) { return i.passed; });
}

Report run_scenario(const ScenarioConfig& config) {
    Report report;
    report.scenario_id = to_string(config.scenario);
    report.seed = config.seed;
    report.config = config.document;
    report.versions = {{"blackbox", std::string(kLibraryVersion)},
                       {"report_schema", kSchemaVersion},
                       {"rng", std::string(SplitMix64::kName)}};
    try {
        switch (config.scenario) {
            case ScenarioId::S1_underdetermination: run_s1(config, report); break;
            case ScenarioId::S2_trap_theorem1: run_s2(config, report); break;
            case ScenarioId::S3_concat_theorem2: run_s3(config, report); break;
            case ScenarioId::S4_two_observers: run_s4(config, report); break;
            case ScenarioId::S5_quantum_pipeline: run_s5(config, report); break;
            case ScenarioId::S6_landauer_ledger: run_s6(config, report); break;
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return report;
}

ReportFormat parse_format(const std::string& text) {
    if (text == "json-lines") return ReportFormat::json_lines;
    if (text == "summary-text") return ReportFormat::summary_text;
    throw ConfigError("format must be \"json-lines\" or \"summary-text\", got \"" + text + "\"");
}

std::string emit_report(const Report& report, ReportFormat format) {
    std::ostringstream os;
    if (format == ReportFormat::json_lines) {
        for (const auto& step : report.steps) os << step.dump() << '\n';
        json invariants = json::array();
        for (const auto& inv : report.invariants) {
            invariants.push_back({{"name", inv.name}, {"passed", inv.passed}, {"detail", inv.detail}});
        }
        const json trailer = {{"type", "trailer"},
                              {"scenario_id", report.scenario_id},
                              {"seed", report.seed},
                              {"passed", report.passed()},
                              {"invariants", invariants},
                              {"verdicts", report.verdicts},
                              {"ledger", report.ledger},
                              {"config", report.config},
                              {"versions", report.versions},
                              {"step_count", report.steps.size()}};
        os << trailer.dump() << '\n';
        return os.str();
    }
    os << "scenario " << report.scenario_id << " (seed " << report.seed << ")\n";
    os << "steps: " << report.steps.size() << '\n';
    for (const auto& inv : report.invariants) {
        os << "  [" << (inv.passed ? "PASS" : "FAIL") << "] " << inv.name;
        if (!inv.detail.empty()) os << " - " << inv.detail;
        os << '\n';
    }
    if (report.ledger.contains("energy_total_joules")) {
        os << "ledger: " << report.ledger["bits_recorded"].get<std::uint64_t>() << " bits, "
           << fmt(report.ledger["energy_total_joules"].get<double>()) << " J\n";
    }
    os << "result: " << (report.passed() ? "PASS" : "FAIL") << '\n';
    return os.str();
}

void write_report(const Report& report, ReportFormat format, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw OutputError("cannot open " + path.string() + " for writing");
    out << emit_report(report, format);
    out.flush();
    if (!out) throw OutputError("failed writing report to " + path.string());
}

}  // namespace blackbox::harness
