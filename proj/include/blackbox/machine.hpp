#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "blackbox/bits.hpp"

namespace blackbox {

using StateId = std::uint32_t;

// Transition/output structure of an autonomous Moore machine. Each state emits
// its output and then moves to its successor. Successors are kept as sets so a
// provisional table built from a trace can record determinism conflicts.
struct MachineTable {
    std::size_t width = 0;
    std::set<StateId> states;
    std::map<StateId, std::set<StateId>> transitions;
    std::map<StateId, Bits> outputs;
    bool provisional = false;

    // Every state has an output of the right width and at least one known successor.
    bool is_total() const;
    // No state has more than one successor.
    bool is_deterministic() const;
    // Throws InvalidTable unless the table is total and deterministic.
    void require_total_deterministic() const;

    StateId successor(StateId s) const;
    const Bits& output(StateId s) const;

    friend bool operator==(const MachineTable&, const MachineTable&) = default;
};

// A candidate total machine together with its start state.
struct MachineHypothesis {
    MachineTable table;
    StateId initial = 0;

    std::size_t size() const noexcept { return table.states.size(); }
};

// Output sequence of the first `length` ticks.
std::vector<Bits> replay(const MachineHypothesis& hyp, std::size_t length);
bool consistent_with(const MachineHypothesis& hyp, const Trace& trace);

// Hypothesis that emits the trace verbatim and then repeats its last outcome.
// Always consistent; one state per outcome (one state for an empty trace of zeros).
MachineHypothesis unrolled_hypothesis(const Trace& trace);

// Canonical representative of an autonomous machine up to bisimulation of its
// reachable part. The reachable part of an autonomous deterministic machine is
// a lasso (a tail followed by a cycle); minimizing it leaves the shortest
// tail/period pair producing the same infinite output sequence.
//
// Serialization: "w=<width>;p=<tail>;c=<cycle>;o=<out0>,<out1>,..." with states
// numbered 0..p+c-1 in visiting order, state i -> i+1 and the last state -> p.
struct CanonicalMachine {
    std::size_t width = 0;
    std::size_t tail = 0;
    std::size_t cycle = 1;
    std::vector<Bits> outputs;  // tail + cycle entries

    std::size_t size() const noexcept { return outputs.size(); }
    std::string serialize() const;
    MachineHypothesis to_hypothesis() const;

    auto operator<=>(const CanonicalMachine& other) const { return serialize() <=> other.serialize(); }
    bool operator==(const CanonicalMachine& other) const = default;
};

CanonicalMachine canonicalize(const MachineHypothesis& hyp);
CanonicalMachine parse_canonical(const std::string& text);
bool equivalent(const MachineHypothesis& a, const MachineHypothesis& b);

}  // namespace blackbox
