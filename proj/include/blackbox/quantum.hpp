#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "blackbox/bits.hpp"
#include "blackbox/boxkit.hpp"

namespace blackbox::quantum {

using Complex = std::complex<double>;
using HiddenStateSet = std::set<boxkit::HiddenStateLabel>;

inline constexpr double kAlgebraicTolerance = 1e-12;
inline constexpr double kPhaseTolerance = 1e-9;

// Pair of orthogonal partial maps sending hidden states to 0 and to 1 at one
// bit position.
struct Povm {
    std::size_t bit_index = 0;  // 0-based
    HiddenStateSet domain0;
    HiddenStateSet domain1;
};

enum class UnvisitedPolicy {
    assign_zero,       // states never seen emitting join domain0
    leave_unassigned,  // left out; diagnostics will list them
};

// Partitions the hidden states by the bit they emitted at `bit_index`.
// `state_log[k]` is the hidden state that produced outcome k. Throws
// StateAliasing when one state is logged with both bit values.
Povm build_povm(const Trace& trace, std::size_t bit_index, const HiddenStateSet& states,
                std::span<const boxkit::HiddenStateLabel> state_log,
                UnvisitedPolicy policy = UnvisitedPolicy::assign_zero);

struct PovmDiagnostics {
    bool orthogonal = false;
    bool resolves_identity = false;
    bool positive = false;
    std::vector<boxkit::HiddenStateLabel> unassigned;
    std::vector<boxkit::HiddenStateLabel> overlapping;
};

PovmDiagnostics povm_diagnostics(const Povm& povm, const HiddenStateSet& states);

// E0 and E1 as diagonal projectors over the state basis (ordered as `states`).
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> povm_operators(const Povm& povm, const HiddenStateSet& states);

enum class PhaseKind { constant, linear };

// phi(t) = value (constant) or value * t (linear). The returned phase angle is
// phi(t) * t.
struct PhaseFunction {
    PhaseKind kind = PhaseKind::constant;
    double value = 0.0;

    double rate(double t) const noexcept { return kind == PhaseKind::constant ? value : value * t; }
    double angle(double t) const noexcept { return rate(t) * t; }
};

struct PhaseSchedule {
    PhaseFunction phi0;
    PhaseFunction phi1;
    double delta_t = 1.0;

    // phi1 = -phi0, which satisfies the phase-sum convention exactly.
    static PhaseSchedule anticorrelated(PhaseFunction phi0, double delta_t);
};

// True iff phi0(t) t + phi1(t) t == 0 (mod 2 pi) within 1e-9 rad at every
// t = k delta_t, k = 1..k_max.
bool phase_anticorrelation_check(const PhaseSchedule& schedule, std::uint64_t k_max);

// Signed distance of an angle from the nearest multiple of 2 pi.
double wrap_angle(double radians) noexcept;

enum class PropagatorVariant {
    paper_literal,     // alpha0 e^{-i phi0 t} E0 + alpha1 e^{-i phi1 t} E1
    normalized_phase,  // unit-modulus phases only; amplitudes live in the state
};

const char* to_string(PropagatorVariant v) noexcept;
PropagatorVariant parse_variant(const std::string& text);

struct PropagatorSpec {
    double alpha0 = 1.0 / 1.4142135623730951;
    double alpha1 = 1.0 / 1.4142135623730951;
    PhaseSchedule schedule;
    PropagatorVariant variant = PropagatorVariant::normalized_phase;
};

struct AmplitudePair {
    Complex a0;
    Complex a1;

    double norm_squared() const noexcept { return std::norm(a0) + std::norm(a1); }
};

// Vector in the direct sum of n two-dimensional spaces (dimension 2n).
struct StateVector {
    std::vector<AmplitudePair> pairs;
    std::int64_t tick = 0;
    double t = 0.0;

    std::size_t dimension() const noexcept { return 2 * pairs.size(); }
    // Largest | |a0|^2 + |a1|^2 - 1 | over pairs.
    double max_normalization_error() const noexcept;
    // Euclidean norm of the whole 2n-vector (sqrt(n) when every pair is normalized).
    double global_norm() const noexcept;
};

// Validated propagator; construction rejects alpha0^2 + alpha1^2 != 1.
class Propagator {
public:
    explicit Propagator(const PropagatorSpec& spec);

    const PropagatorSpec& spec() const noexcept { return spec_; }
    double delta_t() const noexcept { return spec_.schedule.delta_t; }

    // Diagonal 2x2 operator acting on one pair at t = k delta_t.
    Eigen::Matrix2cd matrix(std::int64_t k) const;

private:
    PropagatorSpec spec_;
};

Propagator make_propagator(const PropagatorSpec& spec);

// Advances every pair by the operator evaluated at t = k delta_t; the result
// sits at tick k + 1.
StateVector apply(const Propagator& prop, const StateVector& v, std::int64_t k);
StateVector apply(const Propagator& prop, const StateVector& v);
// Per-pair propagators, one per bit position.
StateVector apply(std::span<const Propagator> props, const StateVector& v);

// Undoes apply(prop, ., k - 1) for a state at tick k. Throws when the operator
// is singular (an alpha of zero in the literal variant).
StateVector apply_inverse(const Propagator& prop, const StateVector& v);
StateVector apply_inverse(std::span<const Propagator> props, const StateVector& v);

// Spectral norm of U^dagger U - I for the pair operator at t = k delta_t.
double unitarity_defect(const Propagator& prop, std::int64_t k);

struct EncodedTick {
    std::uint64_t k = 0;
    double t = 0.0;
    StateVector observed;    // each pair collapsed onto the observed basis vector
    StateVector unobserved;  // alpha-weighted superposition between observations
};

// Maps each outcome to its state vector. `specs` holds one spec per bit.
std::vector<EncodedTick> encode_trace(const Trace& trace, std::span<const PropagatorSpec> specs);

// Superposed state at time t with coefficients taken from the specs.
StateVector unobserved_state(std::span<const PropagatorSpec> specs, std::int64_t tick);

struct BornFit {
    double alpha0_sq = 0.0;
    double alpha1_sq = 0.0;
    double confidence_halfwidth = 0.0;  // 3 sigma binomial
    std::uint64_t sample_count = 0;
};

BornFit born_fit(const Trace& trace, std::size_t bit_index);

struct TimeReversalReport {
    bool reversed_consistent = false;   // reversed trace replays from a hypothesis
    std::size_t reversed_hypothesis_size = 0;
    double roundtrip_error = 0.0;       // max |apply_inverse(apply(v)) - v|
    bool roundtrip_ok = false;

    bool passed() const noexcept { return reversed_consistent && roundtrip_ok; }
};

// Checks that the reversed trace still defines a machine and that the unitary
// (normalized_phase) propagator undoes itself on every encoded state.
TimeReversalReport time_reversal_check(const Trace& trace, std::span<const PropagatorSpec> specs);

}  // namespace blackbox::quantum
