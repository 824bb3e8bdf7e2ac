#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "blackbox/bits.hpp"
#include "blackbox/machine.hpp"
#include "blackbox/rng.hpp"

namespace blackbox::boxkit {

enum class BoxKind { fsm, turing, stochastic, trap, composite };
enum class TrapMode { random, correlated };

const char* to_string(BoxKind kind) noexcept;
const char* to_string(TrapMode mode) noexcept;
TrapMode parse_trap_mode(const std::string& text);

// Opaque hidden-state identifier. Only the simulator sees these.
using HiddenStateLabel = std::uint64_t;

// A degree of freedom whose machine table is fully visible to callers.
struct WhiteBoxDof {
    MachineTable table;
    StateId state = 0;

    std::size_t width() const noexcept { return table.width; }
};

// Validates the table (total, deterministic) and the start state.
WhiteBoxDof make_white_dof(MachineTable table, StateId initial);

enum class Move { left, right, stay };

struct TuringRule {
    char write = '_';
    Move move = Move::stay;
    std::string next;
    bool yield = false;  // the observer tick ends after this rule fires
};

// Single-tape Turing machine. A missing rule for (state, symbol) halts the
// machine, as does entering a halt state. The window [window_offset,
// window_offset + n) is sampled after every tick; a cell reads as bit 1 iff
// it holds '1'.
struct TuringProgram {
    std::string start;
    std::set<std::string> halt_states;
    std::map<std::pair<std::string, char>, TuringRule> rules;
    std::string tape;  // initial contents from cell 0; other cells hold `blank`
    char blank = '_';
    std::int64_t head = 0;
    std::int64_t window_offset = 0;
    std::size_t step_budget = 1000;  // machine steps per observer tick
};

// Turing machine that reproduces the trace of the given FSM box tick for tick.
// Each tick writes the current state's output into the window and moves the
// control to the successor state.
TuringProgram turing_emulation_of(const MachineTable& table, StateId initial);

class SimulationProbe;

// A hidden-state machine emitting fixed-width outcomes. Values are immutable:
// step() returns a successor and leaves the original untouched, so a snapshot
// can be replayed any number of times.
class BoxInstance {
public:
    BoxKind kind() const noexcept;
    std::size_t width() const noexcept { return width_; }
    std::uint64_t seed() const noexcept { return seed_; }
    // Outcomes emitted so far; the next outcome carries index ticks() + 1.
    std::uint64_t ticks() const noexcept { return ticks_; }

private:
    struct Fsm {
        std::shared_ptr<const MachineTable> table;
        StateId state;
    };
    struct CompiledTuring;
    struct Turing {
        std::shared_ptr<const CompiledTuring> program;
        std::uint32_t state;
        std::int64_t head;
        std::int64_t origin;  // cell index of tape[0]
        std::string tape;
        bool halted;
    };
    struct Stochastic {
        std::shared_ptr<const std::vector<double>> p;
        SplitMix64 rng;
    };
    struct Trap {
        std::uint64_t trigger;
        TrapMode mode;
        SplitMix64 rng;
    };
    struct Composite {
        std::shared_ptr<const BoxInstance> inner;
        std::shared_ptr<const MachineTable> white;
        StateId white_state;
    };
    using Impl = std::variant<Fsm, Turing, Stochastic, Trap, Composite>;

    BoxInstance(Impl impl, std::size_t width, std::uint64_t seed)
        : impl_(std::move(impl)), width_(width), seed_(seed) {}

    Impl impl_;
    std::size_t width_;
    std::uint64_t seed_;
    std::uint64_t ticks_ = 0;

    friend std::pair<BoxInstance, Outcome> step(const BoxInstance& box);
    friend BoxInstance make_fsm_box(const MachineTable& table, StateId initial, std::size_t n);
    friend BoxInstance make_trap_box(std::uint64_t trigger, std::size_t n, TrapMode mode, std::uint64_t seed);
    friend BoxInstance make_turing_box(const TuringProgram& program, std::size_t n);
    friend BoxInstance make_stochastic_box(std::vector<double> p, std::uint64_t seed);
    friend BoxInstance concat(const BoxInstance& box, const WhiteBoxDof& dof);
    friend class SimulationProbe;
};

// Emits the outcome for the next time index and returns the successor box.
std::pair<BoxInstance, Outcome> step(const BoxInstance& box);

// Moore semantics: the current state's output is emitted, then the box moves on.
// Rejects partial or nondeterministic tables and width mismatches.
BoxInstance make_fsm_box(const MachineTable& table, StateId initial, std::size_t n);

// Emits the pattern <1,0,1,0,...> for outcomes 1..trigger. Afterwards each
// outcome is uniformly random (random mode) or a single random bit copied
// into every position (correlated mode). Requires n >= 2.
BoxInstance make_trap_box(std::uint64_t trigger, std::size_t n, TrapMode mode, std::uint64_t seed);

BoxInstance make_turing_box(const TuringProgram& program, std::size_t n);

// Bit i of each outcome is 1 with probability p[i]; width is p.size().
BoxInstance make_stochastic_box(std::vector<double> p, std::uint64_t seed);

// Composite of width n + m whose outcome is the box's bits followed by the
// white degree of freedom's bits.
BoxInstance concat(const BoxInstance& box, const WhiteBoxDof& dof);

// Steps the box `length` times and collects the outcomes.
Trace run(BoxInstance box, std::size_t length);

// Simulator-side access to hidden state. The observer API never touches this;
// it exists so the quantum encoder can be fed ground-truth state logs.
class SimulationProbe {
public:
    static HiddenStateLabel hidden_state(const BoxInstance& box);

    struct Run {
        Trace trace;
        std::vector<HiddenStateLabel> states;  // state that produced outcome k, per tick
    };
    static Run simulate(BoxInstance box, std::size_t length);
};

}  // namespace blackbox::boxkit
