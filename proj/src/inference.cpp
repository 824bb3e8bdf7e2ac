#include "blackbox/inference.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <boost/math/distributions/chi_squared.hpp>

#include "blackbox/error.hpp"
#include "blackbox/rng.hpp"

namespace blackbox::inference {

ProvisionalTable build_provisional_table(const Trace& trace, std::size_t window) {
    if (window == 0) throw InvalidArgument("window must be at least 1");
    if (trace.size() < window) {
        throw InvalidArgument("trace of length " + std::to_string(trace.size()) + " is shorter than window " +
                              std::to_string(window));
    }
    ProvisionalTable result;
    result.table.width = trace.width();
    result.table.provisional = true;

    std::map<std::vector<Bits>, StateId> ids;
    for (std::size_t end = window; end <= trace.size(); ++end) {
        std::vector<Bits> history;
        history.reserve(window);
        for (std::size_t i = end - window; i < end; ++i) history.push_back(trace[i].bits);
        auto [it, inserted] = ids.emplace(history, static_cast<StateId>(result.histories.size()));
        if (inserted) {
            result.table.states.insert(it->second);
            result.table.outputs[it->second] = history.back();
            result.histories.push_back(std::move(history));
        }
        result.path.push_back(it->second);
    }
    for (std::size_t i = 0; i + 1 < result.path.size(); ++i) {
        auto& next = result.table.transitions[result.path[i]];
        next.insert(result.path[i + 1]);
        if (next.size() > 1) result.conflict = true;
    }
    return result;
}

EnumerationResult enumerate_consistent_machines(const Trace& trace, std::size_t s_max,
                                                const EnumerationLimits& limits) {
    if (s_max == 0) throw InvalidArgument("state bound must be at least 1");
    EnumerationResult result;
    if (s_max > limits.max_states) {
        result.partial = true;
        result.partial_reason = "state bound " + std::to_string(s_max) + " clamped to " +
                                std::to_string(limits.max_states);
        s_max = limits.max_states;
    }
    const std::size_t n = trace.width();
    if (n >= 64) throw InvalidArgument("outcome width too large to enumerate");
    const std::uint64_t values = std::uint64_t{1} << n;

    std::set<CanonicalMachine> found;
    for (std::size_t m = 1; m <= s_max; ++m) {
        for (std::size_t tail = 0; tail < m; ++tail) {
            const std::size_t cycle = m - tail;
            std::vector<std::optional<Bits>> outputs(m);
            bool ok = true;
            for (std::size_t t = 0; t < trace.size() && ok; ++t) {
                const std::size_t idx = t < tail ? t : tail + (t - tail) % cycle;
                if (!outputs[idx]) {
                    outputs[idx] = trace[t].bits;
                } else {
                    ok = *outputs[idx] == trace[t].bits;
                }
            }
            if (!ok) continue;

            std::vector<std::size_t> free;
            for (std::size_t i = 0; i < m; ++i) {
                if (!outputs[i]) free.push_back(i);
            }
            // Odometer over the outputs of states the trace never reached.
            std::vector<std::uint64_t> digits(free.size(), 0);
            while (true) {
                if (result.candidates_examined >= limits.max_candidates) {
                    result.partial = true;
                    result.partial_reason = "candidate budget of " + std::to_string(limits.max_candidates) +
                                            " exhausted";
                    goto done;
                }
                ++result.candidates_examined;
                CanonicalMachine raw{n, tail, cycle, {}};
                raw.outputs.reserve(m);
                std::size_t f = 0;
                for (std::size_t i = 0; i < m; ++i) {
                    if (outputs[i]) {
                        raw.outputs.push_back(*outputs[i]);
                    } else {
                        raw.outputs.push_back(from_integer(digits[f++], n));
                    }
                }
                found.insert(canonicalize(raw.to_hypothesis()));

                std::size_t pos = 0;
                while (pos < digits.size() && ++digits[pos] == values) digits[pos++] = 0;
                if (pos == digits.size()) break;
            }
        }
    }
done:
    result.hypotheses.assign(found.begin(), found.end());
    return result;
}

MachineHypothesis divergent_extension(const MachineHypothesis& hyp, std::size_t length) {
    hyp.table.require_total_deterministic();
    const auto offset = static_cast<StateId>(length);

    // State hyp occupies at tick length + 1.
    StateId pivot = hyp.initial;
    for (std::size_t i = 0; i < length; ++i) pivot = hyp.table.successor(pivot);
    const auto prefix = replay(hyp, length);

    // Relabel hyp's states to sit after the unrolled chain.
    std::map<StateId, StateId> relabel;
    StateId next_id = offset;
    for (auto s : hyp.table.states) relabel[s] = next_id++;

    MachineHypothesis ext;
    ext.table.width = hyp.table.width;
    for (StateId i = 0; i < offset; ++i) {
        ext.table.states.insert(i);
        ext.table.outputs[i] = prefix[i];
        ext.table.transitions[i] = {i + 1 < offset ? i + 1 : relabel.at(pivot)};
    }
    for (auto s : hyp.table.states) {
        const auto id = relabel.at(s);
        ext.table.states.insert(id);
        Bits out = hyp.table.output(s);
        if (s == pivot && !out.empty()) out[0] ^= 1;
        ext.table.outputs[id] = std::move(out);
        ext.table.transitions[id] = {relabel.at(hyp.table.successor(s))};
    }
    ext.initial = length == 0 ? relabel.at(hyp.initial) : 0;
    return ext;
}

void Partition::validate(std::size_t width) const {
    if (group1.empty() || group2.empty()) throw InvalidArgument("partition groups must be nonempty");
    std::vector<int> seen(width, 0);
    for (const auto* group : {&group1, &group2}) {
        for (auto p : *group) {
            if (p >= width) throw InvalidArgument("partition position " + std::to_string(p) + " out of range");
            if (seen[p]++) throw InvalidArgument("partition position " + std::to_string(p) + " appears twice");
        }
    }
    for (std::size_t p = 0; p < width; ++p) {
        if (!seen[p]) throw InvalidArgument("partition does not cover position " + std::to_string(p));
    }
}

JointHistogram joint_histogram(const Trace& trace, const Partition& partition) {
    partition.validate(trace.width());
    JointHistogram hist;
    auto value_of = [](const Bits& bits, const std::vector<std::size_t>& group) {
        std::uint64_t v = 0;
        for (auto p : group) v = (v << 1) | bits[p];
        return v;
    };
    for (const auto& o : trace) {
        ++hist[{value_of(o.bits, partition.group1), value_of(o.bits, partition.group2)}];
    }
    return hist;
}

const char* to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::independent: return "independent";
        case Verdict::dependent: return "dependent";
        case Verdict::degenerate: return "degenerate";
    }
    return "unknown";
}

IndependenceVerdict independence_test(const Trace& trace, const Partition& partition, double significance) {
    if (trace.empty()) throw InvalidArgument("independence test needs a nonempty trace");
    auto verdict = independence_test(joint_histogram(trace, partition), significance);
    verdict.partition = partition;
    return verdict;
}

IndependenceVerdict independence_test(const JointHistogram& histogram, double significance) {
    if (!(significance > 0.0 && significance < 1.0)) throw InvalidArgument("significance must lie in (0, 1)");
    IndependenceVerdict v;
    v.significance = significance;

    std::map<std::uint64_t, std::uint64_t> rows, cols;
    for (const auto& [key, count] : histogram) {
        if (count == 0) continue;
        rows[key.first] += count;
        cols[key.second] += count;
        v.sample_count += count;
    }
    if (v.sample_count == 0) throw InvalidArgument("independence test needs at least one sample");
    if (rows.size() < 2 || cols.size() < 2) {
        v.verdict = Verdict::degenerate;
        return v;
    }

    const double total = static_cast<double>(v.sample_count);
    double g = 0.0;
    for (const auto& [key, count] : histogram) {
        if (count == 0) continue;
        const double observed = static_cast<double>(count);
        const double expected = static_cast<double>(rows[key.first]) * static_cast<double>(cols[key.second]) / total;
        g += observed * std::log(observed / expected);
    }
    g *= 2.0;
    // Rounding can leave a tiny negative value for exactly independent tables.
    v.g_statistic = std::max(g, 0.0);
    v.mutual_information = v.g_statistic / (2.0 * total);
    v.dof = (rows.size() - 1) * (cols.size() - 1);
    boost::math::chi_squared dist(static_cast<double>(v.dof));
    v.threshold = boost::math::quantile(boost::math::complement(dist, significance));
    v.verdict = v.g_statistic > v.threshold ? Verdict::dependent : Verdict::independent;
    return v;
}

std::pair<boxkit::BoxInstance, RefutationRecord> refute_separability(std::uint64_t trigger, double significance,
                                                                     std::uint64_t seed, boxkit::TrapMode mode) {
    if (trigger == 0) throw InvalidArgument("refutation needs N >= 1 observed outcomes");
    constexpr std::size_t kWidth = 2;
    const Bits pattern{1, 0};
    const auto resampler = derive_seed(seed, "resampler");

    RefutationRecord record;
    record.trigger = trigger;
    record.mode = mode;
    record.root_seed = seed;
    record.predicted = pattern;

    for (std::uint64_t attempt = 1; attempt <= kMaxResampleAttempts; ++attempt) {
        const auto box_seed = derive_seed(resampler, attempt);
        auto box = boxkit::make_trap_box(trigger, kWidth, mode, box_seed);
        const std::size_t length = mode == boxkit::TrapMode::correlated ? 2 * trigger : trigger + 1;
        const auto trace = boxkit::run(box, std::max<std::size_t>(length, trigger + 1));

        bool prefix_ok = true;
        for (std::size_t k = 0; k < trigger; ++k) prefix_ok = prefix_ok && trace[k].bits == pattern;
        const auto& next = trace[trigger].bits;

        record.attempts = attempt;
        record.box_seed = box_seed;
        record.prefix_matches_pattern = prefix_ok;
        record.observed = next;
        if (next == pattern) continue;

        record.violation_step = trigger + 1;
        if (mode == boxkit::TrapMode::correlated) {
            const Partition split{{0}, {1}};
            record.verdict_first_n = independence_test(trace.prefix(trigger), split, significance);
            record.verdict_first_2n = independence_test(trace.prefix(2 * trigger), split, significance);
        }
        return {std::move(box), std::move(record)};
    }
    throw Error("no violation after " + std::to_string(kMaxResampleAttempts) + " resampling attempts");
}

}  // namespace blackbox::inference
