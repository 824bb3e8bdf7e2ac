#include "blackbox/boxkit.hpp"

#include <algorithm>
#include <unordered_map>

#include "blackbox/error.hpp"

namespace blackbox::boxkit {

const char* to_string(BoxKind kind) noexcept {
    switch (kind) {
        case BoxKind::fsm: return "fsm";
        case BoxKind::turing: return "turing";
        case BoxKind::stochastic: return "stochastic";
        case BoxKind::trap: return "trap";
        case BoxKind::composite: return "composite";
    }
    return "unknown";
}

const char* to_string(TrapMode mode) noexcept {
    return mode == TrapMode::random ? "random" : "correlated";
}

TrapMode parse_trap_mode(const std::string& text) {
    if (text == "random") return TrapMode::random;
    if (text == "correlated") return TrapMode::correlated;
    throw InvalidArgument("post_mode must be \"random\" or \"correlated\", got \"" + text + "\"");
}

WhiteBoxDof make_white_dof(MachineTable table, StateId initial) {
    table.require_total_deterministic();
    if (!table.states.contains(initial)) {
        throw InvalidTable("initial state " + std::to_string(initial) + " not in table");
    }
    table.provisional = false;
    return WhiteBoxDof{std::move(table), initial};
}

// Program with state names resolved to indices.
struct BoxInstance::CompiledTuring {
    struct Action {
        char write;
        int move;
        std::uint32_t next;
        bool yield;
    };
    std::vector<std::string> names;
    std::vector<bool> halting;
    std::unordered_map<std::uint64_t, Action> rules;  // key: state << 8 | symbol
    std::uint32_t start = 0;
    char blank = '_';
    std::int64_t head = 0;
    std::int64_t window_offset = 0;
    std::size_t step_budget = 1000;

    static std::uint64_t key(std::uint32_t state, char symbol) noexcept {
        return (static_cast<std::uint64_t>(state) << 8) | static_cast<unsigned char>(symbol);
    }
};

BoxKind BoxInstance::kind() const noexcept {
    return static_cast<BoxKind>(impl_.index());
}

namespace {

Bits trap_pattern(std::size_t n) {
    Bits bits(n);
    for (std::size_t i = 0; i < n; ++i) bits[i] = (i % 2 == 0) ? 1 : 0;
    return bits;
}

char read_cell(const std::string& tape, std::int64_t origin, std::int64_t cell, char blank) {
    const auto idx = cell - origin;
    if (idx < 0 || idx >= static_cast<std::int64_t>(tape.size())) return blank;
    return tape[static_cast<std::size_t>(idx)];
}

void write_cell(std::string& tape, std::int64_t& origin, std::int64_t cell, char symbol, char blank) {
    if (cell < origin) {
        tape.insert(0, static_cast<std::size_t>(origin - cell), blank);
        origin = cell;
    }
    const auto idx = static_cast<std::size_t>(cell - origin);
    if (idx >= tape.size()) tape.resize(idx + 1, blank);
    tape[idx] = symbol;
}

}  // namespace

std::pair<BoxInstance, Outcome> step(const BoxInstance& box) {
    BoxInstance next = box;
    next.ticks_ = box.ticks_ + 1;
    Bits bits(box.width_, 0);

    std::visit(
        [&](auto& impl) {
            using T = std::decay_t<decltype(impl)>;
            if constexpr (std::is_same_v<T, BoxInstance::Fsm>) {
                bits = impl.table->output(impl.state);
                impl.state = impl.table->successor(impl.state);
            } else if constexpr (std::is_same_v<T, BoxInstance::Turing>) {
                const auto& prog = *impl.program;
                for (std::size_t i = 0; i < prog.step_budget && !impl.halted; ++i) {
                    const char symbol = read_cell(impl.tape, impl.origin, impl.head, prog.blank);
                    auto rule = prog.rules.find(BoxInstance::CompiledTuring::key(impl.state, symbol));
                    if (rule == prog.rules.end()) {
                        impl.halted = true;
                        break;
                    }
                    const auto& action = rule->second;
                    write_cell(impl.tape, impl.origin, impl.head, action.write, prog.blank);
                    impl.head += action.move;
                    impl.state = action.next;
                    if (prog.halting[impl.state]) impl.halted = true;
                    if (action.yield) break;
                }
                for (std::size_t i = 0; i < box.width_; ++i) {
                    const auto cell = prog.window_offset + static_cast<std::int64_t>(i);
                    bits[i] = read_cell(impl.tape, impl.origin, cell, prog.blank) == '1' ? 1 : 0;
                }
            } else if constexpr (std::is_same_v<T, BoxInstance::Stochastic>) {
                for (std::size_t i = 0; i < box.width_; ++i) {
                    bits[i] = impl.rng.next_unit() < (*impl.p)[i] ? 1 : 0;
                }
            } else if constexpr (std::is_same_v<T, BoxInstance::Trap>) {
                if (next.ticks_ <= impl.trigger) {
                    bits = trap_pattern(box.width_);
                } else if (impl.mode == TrapMode::random) {
                    for (auto& b : bits) b = impl.rng.next_bit() ? 1 : 0;
                } else {
                    const std::uint8_t b = impl.rng.next_bit() ? 1 : 0;
                    std::fill(bits.begin(), bits.end(), b);
                }
            } else if constexpr (std::is_same_v<T, BoxInstance::Composite>) {
                auto [inner_next, inner_out] = step(*impl.inner);
                std::copy(inner_out.bits.begin(), inner_out.bits.end(), bits.begin());
                const auto& white_out = impl.white->output(impl.white_state);
                std::copy(white_out.begin(), white_out.end(), bits.begin() + static_cast<std::ptrdiff_t>(inner_out.bits.size()));
                impl.inner = std::make_shared<const BoxInstance>(std::move(inner_next));
                impl.white_state = impl.white->successor(impl.white_state);
            }
        },
        next.impl_);

    Outcome out{std::move(bits), next.ticks_};
    return {std::move(next), std::move(out)};
}

BoxInstance make_fsm_box(const MachineTable& table, StateId initial, std::size_t n) {
    if (table.width != n) {
        throw WidthMismatch("table outputs have width " + std::to_string(table.width) + ", box width is " +
                            std::to_string(n));
    }
    table.require_total_deterministic();
    if (!table.states.contains(initial)) {
        throw InvalidTable("initial state " + std::to_string(initial) + " not in table");
    }
    auto owned = std::make_shared<MachineTable>(table);
    owned->provisional = false;
    return BoxInstance(BoxInstance::Fsm{std::move(owned), initial}, n, 0);
}

BoxInstance make_trap_box(std::uint64_t trigger, std::size_t n, TrapMode mode, std::uint64_t seed) {
    if (n < 2) throw InvalidArgument("trap box needs width >= 2");
    return BoxInstance(BoxInstance::Trap{trigger, mode, SplitMix64(seed)}, n, seed);
}

BoxInstance make_turing_box(const TuringProgram& program, std::size_t n) {
    auto compiled = std::make_shared<BoxInstance::CompiledTuring>();
    std::map<std::string, std::uint32_t> index;
    auto intern = [&](const std::string& name) {
        auto [it, inserted] = index.emplace(name, static_cast<std::uint32_t>(compiled->names.size()));
        if (inserted) {
            compiled->names.push_back(name);
            compiled->halting.push_back(program.halt_states.contains(name));
        }
        return it->second;
    };
    if (program.start.empty()) throw InvalidArgument("turing program needs a start state");
    compiled->start = intern(program.start);
    for (const auto& [from, rule] : program.rules) {
        const auto state = intern(from.first);
        const auto next = intern(rule.next);
        const int move = rule.move == Move::left ? -1 : rule.move == Move::right ? 1 : 0;
        compiled->rules.emplace(BoxInstance::CompiledTuring::key(state, from.second),
                                BoxInstance::CompiledTuring::Action{rule.write, move, next, rule.yield});
    }
    if (program.step_budget == 0) throw InvalidArgument("turing step budget must be positive");
    compiled->blank = program.blank;
    compiled->head = program.head;
    compiled->window_offset = program.window_offset;
    compiled->step_budget = program.step_budget;

    BoxInstance::Turing state{compiled, compiled->start, program.head, 0, program.tape,
                              static_cast<bool>(compiled->halting[compiled->start])};
    return BoxInstance(std::move(state), n, 0);
}

BoxInstance make_stochastic_box(std::vector<double> p, std::uint64_t seed) {
    if (p.empty()) throw InvalidArgument("stochastic box needs at least one bit");
    for (double v : p) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw InvalidArgument("emission probability " + std::to_string(v) + " outside [0, 1]");
        }
    }
    const auto n = p.size();
    return BoxInstance(BoxInstance::Stochastic{std::make_shared<const std::vector<double>>(std::move(p)), SplitMix64(seed)},
                       n, seed);
}

BoxInstance concat(const BoxInstance& box, const WhiteBoxDof& dof) {
    dof.table.require_total_deterministic();
    auto white = std::make_shared<const MachineTable>(dof.table);
    return BoxInstance(BoxInstance::Composite{std::make_shared<const BoxInstance>(box), std::move(white), dof.state},
                       box.width() + dof.width(), box.seed());
}

TuringProgram turing_emulation_of(const MachineTable& table, StateId initial) {
    table.require_total_deterministic();
    const auto n = table.width;
    if (n == 0) throw InvalidArgument("cannot emulate a zero-width machine");
    auto write_state = [](StateId s, std::size_t j) { return "w" + std::to_string(s) + "_" + std::to_string(j); };
    auto return_state = [](StateId s, std::size_t j) { return "r" + std::to_string(s) + "_" + std::to_string(j); };

    TuringProgram prog;
    prog.start = write_state(initial, 0);
    prog.tape = std::string(n, '0');
    prog.blank = '0';
    prog.head = 0;
    prog.window_offset = 0;
    // One tick costs n writes plus at most n moves back.
    prog.step_budget = 2 * n + 1;
    for (StateId s : table.states) {
        const auto& out = table.output(s);
        const auto next = table.successor(s);
        for (std::size_t j = 0; j < n; ++j) {
            const char sym = out[j] ? '1' : '0';
            for (char read : {'0', '1'}) {
                TuringRule rule;
                rule.write = sym;
                if (j + 1 < n) {
                    rule.move = Move::right;
                    rule.next = write_state(s, j + 1);
                } else {
                    rule.move = Move::stay;
                    rule.next = return_state(next, n - 1);
                    rule.yield = true;
                }
                prog.rules[{write_state(s, j), read}] = rule;
            }
        }
        for (std::size_t j = 0; j < n; ++j) {
            for (char read : {'0', '1'}) {
                TuringRule rule;
                rule.write = read;
                if (j > 0) {
                    rule.move = Move::left;
                    rule.next = return_state(s, j - 1);
                } else {
                    rule.move = Move::stay;
                    rule.next = write_state(s, 0);
                }
                prog.rules[{return_state(s, j), read}] = rule;
            }
        }
    }
    return prog;
}

Trace run(BoxInstance box, std::size_t length) {
    Trace trace(box.width());
    for (std::size_t i = 0; i < length; ++i) {
        auto [next, out] = step(box);
        // Boxes handed in mid-run keep their own time index; traces restart at 1.
        trace.append_bits(std::move(out.bits));
        box = std::move(next);
    }
    return trace;
}

HiddenStateLabel SimulationProbe::hidden_state(const BoxInstance& box) {
    return std::visit(
        [&](const auto& impl) -> HiddenStateLabel {
            using T = std::decay_t<decltype(impl)>;
            if constexpr (std::is_same_v<T, BoxInstance::Fsm>) {
                return impl.state;
            } else if constexpr (std::is_same_v<T, BoxInstance::Turing>) {
                // Trim blanks so equal configurations hash equally regardless of tape growth.
                const auto first = impl.tape.find_first_not_of(impl.program->blank);
                std::uint64_t h = SplitMix64::mix(impl.state + 1) ^ SplitMix64::mix(static_cast<std::uint64_t>(impl.head) + 0x9E37ULL);
                if (first != std::string::npos) {
                    const auto last = impl.tape.find_last_not_of(impl.program->blank);
                    h ^= SplitMix64::mix(static_cast<std::uint64_t>(impl.origin + static_cast<std::int64_t>(first)));
                    for (std::size_t i = first; i <= last; ++i) {
                        h = SplitMix64::mix(h ^ static_cast<unsigned char>(impl.tape[i]));
                    }
                }
                return h;
            } else if constexpr (std::is_same_v<T, BoxInstance::Stochastic>) {
                return impl.rng.state();
            } else if constexpr (std::is_same_v<T, BoxInstance::Trap>) {
                const auto counter = std::min<std::uint64_t>(box.ticks_, impl.trigger);
                if (box.ticks_ < impl.trigger) return SplitMix64::mix(counter + 1);
                return SplitMix64::mix(counter + 1) ^ impl.rng.state();
            } else {
                return SplitMix64::mix(hidden_state(*impl.inner)) ^ (static_cast<std::uint64_t>(impl.white_state) + 1);
            }
        },
        box.impl_);
}

SimulationProbe::Run SimulationProbe::simulate(BoxInstance box, std::size_t length) {
    Run run{Trace(box.width()), {}};
    run.states.reserve(length);
    for (std::size_t i = 0; i < length; ++i) {
        run.states.push_back(hidden_state(box));
        auto [next, out] = step(box);
        run.trace.append_bits(std::move(out.bits));
        box = std::move(next);
    }
    return run;
}

}  // namespace blackbox::boxkit
