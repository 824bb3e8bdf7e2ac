#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "blackbox/bits.hpp"
#include "blackbox/machine.hpp"

namespace fixtures {

struct Entry {
    blackbox::StateId id;
    std::string output;
    blackbox::StateId next;
};

inline blackbox::MachineTable table(std::size_t width, const std::vector<Entry>& entries) {
    blackbox::MachineTable t;
    t.width = width;
    for (const auto& e : entries) {
        t.states.insert(e.id);
        t.outputs[e.id] = blackbox::parse_bits(e.output);
        t.transitions[e.id] = {e.next};
    }
    return t;
}

// A emits 0, B emits 1.
inline blackbox::MachineTable alternator() { return table(1, {{0, "0", 1}, {1, "1", 0}}); }

inline blackbox::MachineTable constant(const std::string& bits) { return table(bits.size(), {{0, bits, 0}}); }

inline blackbox::Trace trace(std::size_t width, const std::vector<std::string>& rows) {
    return blackbox::Trace::from_strings(width, rows);
}

inline std::vector<std::string> strings(const blackbox::Trace& t) {
    std::vector<std::string> out;
    for (const auto& o : t) out.push_back(blackbox::to_string(o.bits));
    return out;
}

}  // namespace fixtures
