#include "blackbox/machine.hpp"

#include <sstream>

#include "blackbox/error.hpp"

namespace blackbox {

bool MachineTable::is_total() const {
    for (auto s : states) {
        auto out = outputs.find(s);
        if (out == outputs.end() || out->second.size() != width) return false;
        auto tr = transitions.find(s);
        if (tr == transitions.end() || tr->second.empty()) return false;
        for (auto next : tr->second) {
            if (!states.contains(next)) return false;
        }
    }
    return !states.empty();
}

bool MachineTable::is_deterministic() const {
    for (const auto& [s, next] : transitions) {
        if (next.size() > 1) return false;
    }
    return true;
}

void MachineTable::require_total_deterministic() const {
    if (states.empty()) throw InvalidTable("machine table has no states");
    for (auto s : states) {
        auto out = outputs.find(s);
        if (out == outputs.end()) throw InvalidTable("state " + std::to_string(s) + " has no output");
        if (out->second.size() != width) {
            throw InvalidTable("state " + std::to_string(s) + " output has width " +
                               std::to_string(out->second.size()) + ", expected " + std::to_string(width));
        }
        auto tr = transitions.find(s);
        if (tr == transitions.end() || tr->second.empty()) {
            throw InvalidTable("state " + std::to_string(s) + " has no successor");
        }
        if (tr->second.size() > 1) throw InvalidTable("state " + std::to_string(s) + " is nondeterministic");
        if (!states.contains(*tr->second.begin())) {
            throw InvalidTable("state " + std::to_string(s) + " transitions to unknown state " +
                               std::to_string(*tr->second.begin()));
        }
    }
    for (const auto& [s, next] : transitions) {
        if (!states.contains(s)) throw InvalidTable("transition from unknown state " + std::to_string(s));
    }
}

StateId MachineTable::successor(StateId s) const {
    auto it = transitions.find(s);
    if (it == transitions.end() || it->second.size() != 1) {
        throw InvalidTable("state " + std::to_string(s) + " has no unique successor");
    }
    return *it->second.begin();
}

const Bits& MachineTable::output(StateId s) const {
    auto it = outputs.find(s);
    if (it == outputs.end()) throw InvalidTable("state " + std::to_string(s) + " has no output");
    return it->second;
}

std::vector<Bits> replay(const MachineHypothesis& hyp, std::size_t length) {
    std::vector<Bits> out;
    out.reserve(length);
    StateId s = hyp.initial;
    for (std::size_t i = 0; i < length; ++i) {
        out.push_back(hyp.table.output(s));
        s = hyp.table.successor(s);
    }
    return out;
}

bool consistent_with(const MachineHypothesis& hyp, const Trace& trace) {
    if (hyp.table.width != trace.width()) return false;
    StateId s = hyp.initial;
    for (const auto& o : trace) {
        if (hyp.table.output(s) != o.bits) return false;
        s = hyp.table.successor(s);
    }
    return true;
}

MachineHypothesis unrolled_hypothesis(const Trace& trace) {
    MachineHypothesis hyp;
    hyp.table.width = trace.width();
    if (trace.empty()) {
        hyp.table.states = {0};
        hyp.table.outputs[0] = Bits(trace.width(), 0);
        hyp.table.transitions[0] = {0};
        return hyp;
    }
    const auto last = static_cast<StateId>(trace.size() - 1);
    for (StateId s = 0; s <= last; ++s) {
        hyp.table.states.insert(s);
        hyp.table.outputs[s] = trace[s].bits;
        hyp.table.transitions[s] = {s == last ? last : s + 1};
    }
    return hyp;
}

std::string CanonicalMachine::serialize() const {
    std::ostringstream os;
    os << "w=" << width << ";p=" << tail << ";c=" << cycle << ";o=";
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        if (i) os << ',';
        os << to_string(outputs[i]);
    }
    return os.str();
}

MachineHypothesis CanonicalMachine::to_hypothesis() const {
    MachineHypothesis hyp;
    hyp.table.width = width;
    const auto m = static_cast<StateId>(outputs.size());
    for (StateId s = 0; s < m; ++s) {
        hyp.table.states.insert(s);
        hyp.table.outputs[s] = outputs[s];
        hyp.table.transitions[s] = {s + 1 == m ? static_cast<StateId>(tail) : s + 1};
    }
    return hyp;
}

CanonicalMachine canonicalize(const MachineHypothesis& hyp) {
    std::map<StateId, std::size_t> visit;
    std::vector<Bits> outs;
    StateId s = hyp.initial;
    while (!visit.contains(s)) {
        visit.emplace(s, outs.size());
        outs.push_back(hyp.table.output(s));
        s = hyp.table.successor(s);
    }
    std::size_t tail = visit.at(s);
    std::size_t cycle = outs.size() - tail;

    // Shortest period of the cycle.
    for (std::size_t d = 1; d <= cycle; ++d) {
        if (cycle % d != 0) continue;
        bool periodic = true;
        for (std::size_t i = 0; i < cycle && periodic; ++i) {
            periodic = outs[tail + i] == outs[tail + (i + d) % cycle];
        }
        if (periodic) {
            cycle = d;
            break;
        }
    }
    outs.resize(tail + cycle);

    // Absorb tail states that already follow the cycle pattern.
    while (tail > 0 && outs[tail - 1] == outs[tail - 1 + cycle]) {
        outs.pop_back();
        --tail;
    }
    return CanonicalMachine{hyp.table.width, tail, cycle, std::move(outs)};
}

CanonicalMachine parse_canonical(const std::string& text) {
    CanonicalMachine m;
    std::istringstream is(text);
    std::string field;
    bool have_w = false, have_p = false, have_c = false, have_o = false;
    while (std::getline(is, field, ';')) {
        auto eq = field.find('=');
        if (eq == std::string::npos) throw InvalidArgument("malformed machine serialization: " + text);
        auto key = field.substr(0, eq);
        auto value = field.substr(eq + 1);
        if (key == "w") {
            m.width = std::stoul(value);
            have_w = true;
        } else if (key == "p") {
            m.tail = std::stoul(value);
            have_p = true;
        } else if (key == "c") {
            m.cycle = std::stoul(value);
            have_c = true;
        } else if (key == "o") {
            std::istringstream vs(value);
            std::string item;
            while (std::getline(vs, item, ',')) m.outputs.push_back(parse_bits(item));
            have_o = true;
        } else {
            throw InvalidArgument("unknown field in machine serialization: " + key);
        }
    }
    if (!(have_w && have_p && have_c && have_o) || m.cycle == 0 || m.outputs.size() != m.tail + m.cycle) {
        throw InvalidArgument("malformed machine serialization: " + text);
    }
    for (const auto& o : m.outputs) {
        if (o.size() != m.width) throw InvalidArgument("output width mismatch in serialization: " + text);
    }
    return m;
}

bool equivalent(const MachineHypothesis& a, const MachineHypothesis& b) {
    return canonicalize(a) == canonicalize(b);
}

}  // namespace blackbox
