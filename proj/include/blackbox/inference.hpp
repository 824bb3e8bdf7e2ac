#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "blackbox/bits.hpp"
#include "blackbox/boxkit.hpp"
#include "blackbox/machine.hpp"

namespace blackbox::inference {

// Table whose states are the distinct length-`window` outcome histories seen
// in a trace. A state's output is the last outcome of its history.
struct ProvisionalTable {
    MachineTable table;
    std::vector<std::vector<Bits>> histories;  // indexed by state id
    std::vector<StateId> path;                 // state at each window position
    // Some history was followed by two different outcomes.
    bool conflict = false;
};

ProvisionalTable build_provisional_table(const Trace& trace, std::size_t window);

struct EnumerationLimits {
    std::size_t max_states = 4;
    std::uint64_t max_candidates = 1u << 20;
};

struct EnumerationResult {
    // Canonical forms, sorted by serialization, one per equivalence class.
    std::vector<CanonicalMachine> hypotheses;
    bool partial = false;
    std::string partial_reason;
    std::uint64_t candidates_examined = 0;
};

// Every autonomous Moore machine with at most s_max states that reproduces the
// trace, up to bisimulation of reachable parts. Searches tail/cycle shapes
// directly instead of enumerating transition functions.
EnumerationResult enumerate_consistent_machines(const Trace& trace, std::size_t s_max,
                                                const EnumerationLimits& limits = {});

// A hypothesis with at most hyp.size() + length states that matches hyp for
// `length` ticks and then emits a different outcome: the first `length`
// outputs are unrolled into a chain, which then hands over to a copy of hyp
// whose state at tick length + 1 has its first bit flipped.
MachineHypothesis divergent_extension(const MachineHypothesis& hyp, std::size_t length);

// Bit positions (0-based) split into two disjoint, nonempty, covering groups.
struct Partition {
    std::vector<std::size_t> group1;
    std::vector<std::size_t> group2;

    void validate(std::size_t width) const;
};

// Counts of (group1 value, group2 value) pairs.
using JointHistogram = std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint64_t>;

JointHistogram joint_histogram(const Trace& trace, const Partition& partition);

enum class Verdict { independent, dependent, degenerate };
const char* to_string(Verdict v) noexcept;

struct IndependenceVerdict {
    Partition partition;
    double g_statistic = 0.0;  // 2 N I(group1; group2), natural log
    double mutual_information = 0.0;  // nats
    double threshold = 0.0;
    double significance = 0.0;
    std::uint64_t dof = 0;
    std::uint64_t sample_count = 0;
    Verdict verdict = Verdict::degenerate;
};

// G-test of independence between the two groups of a partition.
IndependenceVerdict independence_test(const Trace& trace, const Partition& partition, double significance);
IndependenceVerdict independence_test(const JointHistogram& histogram, double significance);

inline constexpr double kDefaultSignificance = 0.01;

struct RefutationRecord {
    std::uint64_t trigger = 0;  // N
    boxkit::TrapMode mode = boxkit::TrapMode::random;
    std::uint64_t root_seed = 0;
    std::uint64_t box_seed = 0;
    std::uint64_t attempts = 0;
    bool prefix_matches_pattern = false;  // outcomes 1..N all equal the pattern
    Bits predicted;                       // what a separation after N outcomes forecasts
    Bits observed;                        // realized outcome N + 1
    std::optional<std::uint64_t> violation_step;
    // Correlated mode only: verdicts over outcomes 1..N and 1..2N.
    std::optional<IndependenceVerdict> verdict_first_n;
    std::optional<IndependenceVerdict> verdict_first_2n;
};

inline constexpr std::uint64_t kMaxResampleAttempts = 10000;

// Builds a 2-bit trap box whose first N outcomes are <1,0> and shows outcome
// N + 1 breaks the "<1,0> forever" prediction, reseeding until it does.
// Returns the trap box in its initial state together with the record.
std::pair<boxkit::BoxInstance, RefutationRecord> refute_separability(std::uint64_t trigger, double significance,
                                                                     std::uint64_t seed,
                                                                     boxkit::TrapMode mode = boxkit::TrapMode::random);

}  // namespace blackbox::inference
