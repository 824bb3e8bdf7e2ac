#pragma once

// Reference enumeration that shares no code with the library's lasso search:
// every total transition function and output assignment on states 0..m-1,
// started at state 0, is replayed directly.

#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using Row = std::vector<std::uint8_t>;

// Ultimately periodic sequences with preperiod <= s and periods p, q <= s agree
// everywhere once they agree on s + p + q positions (Fine and Wilf).
inline std::size_t behaviour_horizon(std::size_t s_max) { return 3 * s_max; }

inline std::string encode(const std::vector<Row>& rows) {
    std::string out;
    for (const auto& r : rows) {
        for (auto b : r) out.push_back(static_cast<char>('0' + b));
        out.push_back('|');
    }
    return out;
}

// Behaviours (prefixes of length behaviour_horizon) of all machines with at
// most s_max states whose first trace.size() outputs equal the trace.
inline std::set<std::string> consistent_behaviours(const std::vector<Row>& trace, std::size_t width,
                                                   std::size_t s_max) {
    const std::size_t horizon = behaviour_horizon(s_max);
    const std::uint64_t symbols = std::uint64_t{1} << width;
    std::set<std::string> result;
    for (std::size_t m = 1; m <= s_max; ++m) {
        std::uint64_t n_delta = 1, n_out = 1;
        for (std::size_t i = 0; i < m; ++i) {
            n_delta *= m;
            n_out *= symbols;
        }
        for (std::uint64_t d = 0; d < n_delta; ++d) {
            std::vector<std::size_t> delta(m);
            for (std::size_t i = 0, x = d; i < m; ++i, x /= m) delta[i] = x % m;
            for (std::uint64_t o = 0; o < n_out; ++o) {
                std::vector<Row> out(m, Row(width));
                for (std::size_t i = 0, x = o; i < m; ++i, x /= symbols) {
                    for (std::size_t b = 0; b < width; ++b) out[i][width - 1 - b] = (x % symbols >> b) & 1;
                }
                std::vector<Row> emitted;
                std::size_t s = 0;
                bool ok = true;
                for (std::size_t t = 0; t < std::max(horizon, trace.size()); ++t) {
                    if (t < trace.size() && out[s] != trace[t]) {
                        ok = false;
                        break;
                    }
                    if (t < horizon) emitted.push_back(out[s]);
                    s = delta[s];
                }
                if (ok) result.insert(encode(emitted));
            }
        }
    }
    return result;
}

}  // namespace oracle
