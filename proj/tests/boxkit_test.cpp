#include <gtest/gtest.h>

#include <cmath>

#include "blackbox/box_spec.hpp"
#include "blackbox/boxkit.hpp"
#include "blackbox/error.hpp"
#include "support/fixtures.hpp"

using namespace blackbox;
using namespace blackbox::boxkit;
using fixtures::strings;

namespace {

TuringProgram counter_program(std::size_t n) {
    // Increment from the rightmost window cell, walk back right, yield.
    TuringProgram p;
    p.start = "inc";
    p.tape = std::string(n, '0');
    p.head = static_cast<std::int64_t>(n) - 1;
    p.rules[{"inc", '1'}] = {'0', Move::left, "inc", false};
    p.rules[{"inc", '0'}] = {'1', Move::right, "back", false};
    p.rules[{"inc", '_'}] = {'_', Move::right, "back", false};  // overflow past cell 0
    p.rules[{"back", '0'}] = {'0', Move::right, "back", false};
    p.rules[{"back", '1'}] = {'1', Move::right, "back", false};
    p.rules[{"back", '_'}] = {'_', Move::left, "inc", true};
    return p;
}

std::vector<std::string> software_counter(std::size_t n, std::size_t length) {
    std::vector<std::string> out;
    for (std::size_t k = 1; k <= length; ++k) out.push_back(to_string(from_integer(k % (1u << n), n)));
    return out;
}

}  // namespace

TEST(Fsm, AlternatorStepFromA) {
    auto box = make_fsm_box(fixtures::alternator(), 0, 1);
    auto [next, out] = step(box);
    EXPECT_EQ(out.bits, Bits{0});
    EXPECT_EQ(out.k, 1u);
    EXPECT_EQ(SimulationProbe::hidden_state(next), 1u);
    EXPECT_EQ(SimulationProbe::hidden_state(box), 0u);  // original untouched
}

TEST(Fsm, ConstantAndAlternatorTraces) {
    EXPECT_EQ(strings(run(make_fsm_box(fixtures::constant("1"), 0, 1), 4)),
              (std::vector<std::string>{"1", "1", "1", "1"}));
    EXPECT_EQ(strings(run(make_fsm_box(fixtures::alternator(), 0, 1), 5)),
              (std::vector<std::string>{"0", "1", "0", "1", "0"}));
}

TEST(Fsm, AcceptsEveryFullSizeTableAndIsSpecifiedByItsRun) {
    // n = 2: 4 states; the a-priori-known table is exercised over 2^(2n) = 16 ticks.
    const std::size_t n = 2;
    for (std::uint32_t seed = 0; seed < 64; ++seed) {
        SplitMix64 rng(seed);
        std::vector<fixtures::Entry> entries;
        for (StateId s = 0; s < 4; ++s) {
            entries.push_back({s, to_string(from_integer(rng.next() % 4, n)), static_cast<StateId>(rng.next() % 4)});
        }
        const auto table = fixtures::table(n, entries);
        const auto trace = run(make_fsm_box(table, 0, n), 16);
        const MachineHypothesis hyp{table, 0};
        EXPECT_EQ(trace.rows(), replay(hyp, 16));
    }
}

TEST(Fsm, RejectsBadTables) {
    auto partial = fixtures::table(1, {{0, "0", 1}});
    EXPECT_THROW(make_fsm_box(partial, 0, 1), InvalidTable);
    auto nondet = fixtures::alternator();
    nondet.transitions[0].insert(0);
    EXPECT_THROW(make_fsm_box(nondet, 0, 1), InvalidTable);
    EXPECT_THROW(make_fsm_box(fixtures::alternator(), 0, 2), Error);
    EXPECT_THROW(make_fsm_box(fixtures::alternator(), 7, 1), Error);
}

TEST(Trap, PatternPrefixIsTenN3) {
    for (auto mode : {TrapMode::random, TrapMode::correlated}) {
        auto t = run(make_trap_box(3, 2, mode, 99), 3);
        EXPECT_EQ(strings(t), (std::vector<std::string>{"10", "10", "10"}));
    }
}

TEST(Trap, WiderPatternRepeatsPairs) {
    auto t = run(make_trap_box(2, 5, TrapMode::random, 1), 2);
    EXPECT_EQ(strings(t), (std::vector<std::string>{"10101", "10101"}));
}

TEST(Trap, ZeroTriggerIsRandomFromTheStart) {
    int distinct_first = 0;
    for (std::uint64_t seed = 0; seed < 64; ++seed) {
        auto t = run(make_trap_box(0, 2, TrapMode::correlated, seed), 8);
        for (const auto& o : t) EXPECT_EQ(o.bits[0], o.bits[1]);
        distinct_first += t[0].bits != Bits{1, 0};
    }
    EXPECT_GT(distinct_first, 0);
}

TEST(Trap, PostTriggerDeviationRateIsThreeQuarters) {
    // Four equiprobable pairs, one of which is <1,0>.
    const int seeds = 8000;
    int deviations = 0;
    for (int s = 0; s < seeds; ++s) {
        auto t = run(make_trap_box(3, 2, TrapMode::random, derive_seed(12345, static_cast<std::uint64_t>(s))), 4);
        deviations += t[3].bits != Bits{1, 0};
    }
    const double rate = static_cast<double>(deviations) / seeds;
    const double sigma = std::sqrt(0.75 * 0.25 / seeds);
    EXPECT_NEAR(rate, 0.75, 5 * sigma);
}

TEST(Trap, ContractHoldsAcrossWidthsAndSeeds) {
    for (std::size_t n = 2; n <= 6; ++n) {
        for (std::uint64_t N : {0u, 1u, 5u, 17u}) {
            for (std::uint64_t seed = 0; seed < 10; ++seed) {
                auto t = run(make_trap_box(N, n, TrapMode::correlated, seed), N + 20);
                for (std::size_t k = 0; k < t.size(); ++k) {
                    ASSERT_EQ(t[k].bits.size(), n);
                    for (std::size_t j = 0; j < n; ++j) {
                        if (k < N) {
                            ASSERT_EQ(t[k].bits[j], j % 2 == 0 ? 1 : 0);
                        } else {
                            ASSERT_EQ(t[k].bits[j], t[k].bits[0]);
                        }
                    }
                }
            }
        }
    }
}

TEST(Trap, RejectsWidthOne) { EXPECT_THROW(make_trap_box(3, 1, TrapMode::random, 0), Error); }

TEST(Turing, ConstantTape) {
    TuringProgram p;
    p.start = "s";
    p.tape = "111";
    p.rules[{"s", '1'}] = {'1', Move::stay, "s", true};
    auto t = run(make_turing_box(p, 3), 5);
    for (const auto& o : t) EXPECT_EQ(to_string(o.bits), "111");
}

TEST(Turing, BinaryCounterMatchesSoftwareCounter) {
    for (std::size_t n = 1; n <= 4; ++n) {
        const std::size_t length = (1u << n) * 2 + 3;
        EXPECT_EQ(strings(run(make_turing_box(counter_program(n), n), length)), software_counter(n, length))
            << "width " << n;
    }
}

TEST(Turing, DistinctMachinesEmulatingAlternatorAgree) {
    TuringProgram hand;
    hand.start = "a";
    hand.tape = "0";
    for (char c : {'0', '1'}) {
        hand.rules[{"a", c}] = {'0', Move::stay, "b", true};
        hand.rules[{"b", c}] = {'1', Move::stay, "a", true};
    }
    const auto generated = turing_emulation_of(fixtures::alternator(), 0);
    const auto a = run(make_turing_box(hand, 1), 12);
    const auto b = run(make_turing_box(generated, 1), 12);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, run(make_fsm_box(fixtures::alternator(), 0, 1), 12));
}

TEST(Turing, EmulationOfRandomTablesMatchesFsm) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        SplitMix64 rng(seed);
        const std::size_t n = 1 + rng.next() % 3;
        const std::size_t m = 1 + rng.next() % 5;
        std::vector<fixtures::Entry> entries;
        for (StateId s = 0; s < m; ++s) {
            entries.push_back({s, to_string(from_integer(rng.next(), n)), static_cast<StateId>(rng.next() % m)});
        }
        const auto table = fixtures::table(n, entries);
        EXPECT_EQ(run(make_turing_box(turing_emulation_of(table, 0), n), 30), run(make_fsm_box(table, 0, n), 30));
    }
}

TEST(Turing, BudgetExhaustionStillYieldsWindow) {
    TuringProgram spin;
    spin.start = "s";
    spin.tape = "1";
    spin.step_budget = 10;
    spin.rules[{"s", '1'}] = {'1', Move::stay, "s", false};  // never yields
    auto t = run(make_turing_box(spin, 1), 3);
    EXPECT_EQ(strings(t), (std::vector<std::string>{"1", "1", "1"}));
}

TEST(Turing, HaltedMachineKeepsEmittingItsWindow) {
    TuringProgram p;
    p.start = "s";
    p.tape = "0";
    p.halt_states = {"h"};
    p.rules[{"s", '0'}] = {'1', Move::stay, "h", false};
    EXPECT_EQ(strings(run(make_turing_box(p, 1), 3)), (std::vector<std::string>{"1", "1", "1"}));
}

TEST(Stochastic, DegenerateProbabilities) {
    for (const auto& o : run(make_stochastic_box({1.0}, 5), 50)) EXPECT_EQ(o.bits, Bits{1});
    for (const auto& o : run(make_stochastic_box({0.0}, 5), 50)) EXPECT_EQ(o.bits, Bits{0});
}

TEST(Stochastic, RejectsOutOfRange) {
    EXPECT_THROW(make_stochastic_box({1.5}, 0), Error);
    EXPECT_THROW(make_stochastic_box({-0.1}, 0), Error);
}

TEST(Stochastic, FrequencyWithinBinomialBand) {
    // 3 sigma for p = 0.3, N = 1e4 is 0.01375.
    int inside = 0;
    const int seeds = 200;
    for (int s = 0; s < seeds; ++s) {
        const auto t = run(make_stochastic_box({0.3}, derive_seed(7, static_cast<std::uint64_t>(s))), 10000);
        std::size_t ones = 0;
        for (const auto& o : t) ones += o.bits[0];
        inside += std::abs(static_cast<double>(ones) / 10000.0 - 0.3) <= 0.014;
    }
    EXPECT_GE(inside, 195);
}

TEST(Stochastic, SnapshotReplaysIdentically) {
    auto box = make_stochastic_box({0.5, 0.5, 0.5}, 42);
    auto [b1, o1] = step(box);
    auto [b2, o2] = step(box);
    EXPECT_EQ(o1, o2);
    EXPECT_EQ(run(b1, 50), run(b2, 50));
}

TEST(Concat, AlternatorWithConstantZero) {
    const auto dof = make_white_dof(fixtures::constant("0"), 0);
    const auto box = concat(make_fsm_box(fixtures::alternator(), 0, 1), dof);
    EXPECT_EQ(box.width(), 2u);
    EXPECT_EQ(strings(run(box, 4)), (std::vector<std::string>{"00", "10", "00", "10"}));
}

TEST(Concat, TrapWithWhiteCounter) {
    const auto dof = make_white_dof(fixtures::table(1, {{0, "0", 1}, {1, "1", 0}}), 0);
    const auto box = concat(make_trap_box(3, 2, TrapMode::random, 3), dof);
    EXPECT_EQ(box.width(), 3u);
    EXPECT_EQ(strings(run(box, 3)), (std::vector<std::string>{"100", "101", "100"}));
}

TEST(Concat, ProjectionIdentityForEveryKind) {
    const auto dof = make_white_dof(fixtures::table(2, {{0, "01", 1}, {1, "11", 2}, {2, "00", 0}}), 1);
    std::vector<BoxInstance> boxes{
        make_fsm_box(fixtures::alternator(), 1, 1),
        make_trap_box(4, 2, TrapMode::random, 8),
        make_stochastic_box({0.2, 0.7}, 9),
        make_turing_box(counter_program(3), 3),
    };
    boxes.push_back(concat(boxes[0], dof));
    for (const auto& b : boxes) {
        for (std::size_t len : {0u, 1u, 7u, 40u}) {
            const auto composite = run(concat(b, dof), len);
            EXPECT_EQ(composite.columns(0, b.width()), run(b, len));
        }
    }
}

TEST(Replay, EveryKindIsDeterministicGivenSeed) {
    const auto json_specs = {
        R"({"kind":"fsm","n":1,"initial":0,"states":[{"id":0,"output":"0","next":1},{"id":1,"output":"1","next":0}]})",
        R"({"kind":"trap","n":2,"N":3,"post_mode":"random","seed":5})",
        R"({"kind":"stochastic","p":[0.5,0.1],"seed":5})",
        R"({"kind":"composite","box":{"kind":"stochastic","p":[0.5]},"white":{"initial":0,"states":[{"id":0,"output":"1","next":0}]}})",
    };
    for (const auto* text : json_specs) {
        const auto spec = nlohmann::json::parse(text);
        EXPECT_EQ(run(box_from_json(spec, 11), 64), run(box_from_json(spec, 11), 64)) << text;
    }
}

TEST(Probe, HiddenStatesOfAlternator) {
    const auto r = SimulationProbe::simulate(make_fsm_box(fixtures::alternator(), 0, 1), 4);
    EXPECT_EQ(r.states, (std::vector<HiddenStateLabel>{0, 1, 0, 1}));
    EXPECT_EQ(strings(r.trace), (std::vector<std::string>{"0", "1", "0", "1"}));
}

TEST(BoxSpec, RejectsUnknownKeysAndKinds) {
    EXPECT_THROW(box_from_json(nlohmann::json::parse(R"({"kind":"trap","N":1,"colour":"red"})"), 0), ConfigError);
    EXPECT_THROW(box_from_json(nlohmann::json::parse(R"({"kind":"oracle"})"), 0), ConfigError);
    EXPECT_THROW(box_from_json(nlohmann::json::parse(R"({"kind":"stochastic","n":2,"p":[0.5]})"), 0), ConfigError);
}

TEST(BoxSpec, ConflictingStateEntriesAreNondeterministic) {
    const auto spec = nlohmann::json::parse(
        R"({"kind":"fsm","n":1,"initial":0,"states":[{"id":0,"output":"0","next":0},{"id":0,"output":"0","next":1},{"id":1,"output":"1","next":0}]})");
    EXPECT_THROW(box_from_json(spec, 0), InvalidTable);
}
