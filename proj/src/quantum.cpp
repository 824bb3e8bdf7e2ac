#include "blackbox/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "blackbox/error.hpp"
#include "blackbox/machine.hpp"

namespace blackbox::quantum {

Povm build_povm(const Trace& trace, std::size_t bit_index, const HiddenStateSet& states,
                std::span<const boxkit::HiddenStateLabel> state_log, UnvisitedPolicy policy) {
    if (state_log.size() != trace.size()) {
        throw InvalidArgument("state log has " + std::to_string(state_log.size()) + " entries for a trace of " +
                              std::to_string(trace.size()));
    }
    if (bit_index >= trace.width()) throw InvalidArgument("bit index out of range");
    Povm povm;
    povm.bit_index = bit_index;
    for (std::size_t k = 0; k < trace.size(); ++k) {
        const auto state = state_log[k];
        if (!states.contains(state)) {
            throw InvalidArgument("logged hidden state " + std::to_string(state) + " is not in the state set");
        }
        const bool one = trace[k].bits[bit_index] != 0;
        auto& mine = one ? povm.domain1 : povm.domain0;
        const auto& other = one ? povm.domain0 : povm.domain1;
        if (other.contains(state)) {
            throw StateAliasing("hidden state " + std::to_string(state) + " emitted both 0 and 1 at bit " +
                                std::to_string(bit_index) + " (first conflict at tick " + std::to_string(k + 1) + ")");
        }
        mine.insert(state);
    }
    if (policy == UnvisitedPolicy::assign_zero) {
        for (auto s : states) {
            if (!povm.domain1.contains(s)) povm.domain0.insert(s);
        }
    }
    return povm;
}

PovmDiagnostics povm_diagnostics(const Povm& povm, const HiddenStateSet& states) {
    PovmDiagnostics d;
    std::set_intersection(povm.domain0.begin(), povm.domain0.end(), povm.domain1.begin(), povm.domain1.end(),
                          std::back_inserter(d.overlapping));
    for (auto s : states) {
        if (!povm.domain0.contains(s) && !povm.domain1.contains(s)) d.unassigned.push_back(s);
    }
    bool outside = false;
    for (const auto* domain : {&povm.domain0, &povm.domain1}) {
        for (auto s : *domain) outside = outside || !states.contains(s);
    }
    d.orthogonal = d.overlapping.empty();
    d.resolves_identity = d.unassigned.empty() && d.overlapping.empty() && !outside;
    // Indicator operators are diagonal with 0/1 entries, hence positive.
    d.positive = true;
    return d;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> povm_operators(const Povm& povm, const HiddenStateSet& states) {
    const auto dim = static_cast<Eigen::Index>(states.size());
    Eigen::MatrixXd e0 = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::MatrixXd e1 = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::Index i = 0;
    for (auto s : states) {
        if (povm.domain0.contains(s)) e0(i, i) = 1.0;
        if (povm.domain1.contains(s)) e1(i, i) = 1.0;
        ++i;
    }
    return {e0, e1};
}

PhaseSchedule PhaseSchedule::anticorrelated(PhaseFunction phi0, double delta_t) {
    return PhaseSchedule{phi0, PhaseFunction{phi0.kind, -phi0.value}, delta_t};
}

double wrap_angle(double radians) noexcept {
    return std::remainder(radians, 2.0 * std::numbers::pi);
}

bool phase_anticorrelation_check(const PhaseSchedule& schedule, std::uint64_t k_max) {
    if (k_max == 0) throw InvalidArgument("k_max must be at least 1");
    for (std::uint64_t k = 1; k <= k_max; ++k) {
        const double t = static_cast<double>(k) * schedule.delta_t;
        const double sum = schedule.phi0.angle(t) + schedule.phi1.angle(t);
        if (std::abs(wrap_angle(sum)) > kPhaseTolerance) return false;
    }
    return true;
}

const char* to_string(PropagatorVariant v) noexcept {
    return v == PropagatorVariant::paper_literal ? "paper_literal" : "normalized_phase";
}

PropagatorVariant parse_variant(const std::string& text) {
    if (text == "paper_literal") return PropagatorVariant::paper_literal;
    if (text == "normalized_phase") return PropagatorVariant::normalized_phase;
    throw InvalidArgument("variant must be \"paper_literal\" or \"normalized_phase\", got \"" + text + "\"");
}

double StateVector::max_normalization_error() const noexcept {
    double worst = 0.0;
    for (const auto& p : pairs) worst = std::max(worst, std::abs(p.norm_squared() - 1.0));
    return worst;
}

double StateVector::global_norm() const noexcept {
    double sum = 0.0;
    for (const auto& p : pairs) sum += p.norm_squared();
    return std::sqrt(sum);
}

Propagator::Propagator(const PropagatorSpec& spec) : spec_(spec) {
    const double norm = spec.alpha0 * spec.alpha0 + spec.alpha1 * spec.alpha1;
    if (std::abs(norm - 1.0) > kAlgebraicTolerance) {
        throw InvalidArgument("alpha0^2 + alpha1^2 = " + std::to_string(norm) + ", expected 1");
    }
    if (!(spec.schedule.delta_t > 0.0)) throw InvalidArgument("delta_t must be positive");
}

namespace {

struct PairFactors {
    Complex c0;
    Complex c1;
};

PairFactors factors(const PropagatorSpec& spec, std::int64_t k) {
    const double t = static_cast<double>(k) * spec.schedule.delta_t;
    const Complex p0 = std::polar(1.0, -spec.schedule.phi0.angle(t));
    const Complex p1 = std::polar(1.0, -spec.schedule.phi1.angle(t));
    if (spec.variant == PropagatorVariant::normalized_phase) return {p0, p1};
    return {spec.alpha0 * p0, spec.alpha1 * p1};
}

StateVector at_tick(std::vector<AmplitudePair> pairs, std::int64_t tick, double delta_t) {
    return StateVector{std::move(pairs), tick, static_cast<double>(tick) * delta_t};
}

}  // namespace

Eigen::Matrix2cd Propagator::matrix(std::int64_t k) const {
    const auto f = factors(spec_, k);
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    m(0, 0) = f.c0;
    m(1, 1) = f.c1;
    return m;
}

Propagator make_propagator(const PropagatorSpec& spec) {
    return Propagator(spec);
}

StateVector apply(const Propagator& prop, const StateVector& v, std::int64_t k) {
    const auto f = factors(prop.spec(), k);
    std::vector<AmplitudePair> pairs;
    pairs.reserve(v.pairs.size());
    for (const auto& p : v.pairs) pairs.push_back({p.a0 * f.c0, p.a1 * f.c1});
    return at_tick(std::move(pairs), k + 1, prop.delta_t());
}

StateVector apply(const Propagator& prop, const StateVector& v) {
    return apply(prop, v, v.tick);
}

StateVector apply(std::span<const Propagator> props, const StateVector& v) {
    if (props.size() != v.pairs.size()) throw WidthMismatch("one propagator per pair required");
    std::vector<AmplitudePair> pairs;
    pairs.reserve(v.pairs.size());
    for (std::size_t i = 0; i < props.size(); ++i) {
        const auto f = factors(props[i].spec(), v.tick);
        pairs.push_back({v.pairs[i].a0 * f.c0, v.pairs[i].a1 * f.c1});
    }
    return at_tick(std::move(pairs), v.tick + 1, props.empty() ? 0.0 : props[0].delta_t());
}

namespace {

AmplitudePair undo(const AmplitudePair& p, const PairFactors& f) {
    if (std::abs(f.c0) == 0.0 || std::abs(f.c1) == 0.0) {
        throw InvalidArgument("propagator is singular and has no inverse");
    }
    return {p.a0 / f.c0, p.a1 / f.c1};
}

}  // namespace

StateVector apply_inverse(const Propagator& prop, const StateVector& v) {
    const auto f = factors(prop.spec(), v.tick - 1);
    std::vector<AmplitudePair> pairs;
    pairs.reserve(v.pairs.size());
    for (const auto& p : v.pairs) pairs.push_back(undo(p, f));
    return at_tick(std::move(pairs), v.tick - 1, prop.delta_t());
}

StateVector apply_inverse(std::span<const Propagator> props, const StateVector& v) {
    if (props.size() != v.pairs.size()) throw WidthMismatch("one propagator per pair required");
    std::vector<AmplitudePair> pairs;
    pairs.reserve(v.pairs.size());
    for (std::size_t i = 0; i < props.size(); ++i) {
        pairs.push_back(undo(v.pairs[i], factors(props[i].spec(), v.tick - 1)));
    }
    return at_tick(std::move(pairs), v.tick - 1, props.empty() ? 0.0 : props[0].delta_t());
}

double unitarity_defect(const Propagator& prop, std::int64_t k) {
    const Eigen::Matrix2cd u = prop.matrix(k);
    const Eigen::Matrix2cd d = u.adjoint() * u - Eigen::Matrix2cd::Identity();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> solver(d, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

namespace {

double common_delta_t(std::span<const PropagatorSpec> specs) {
    if (specs.empty()) throw InvalidArgument("at least one propagator spec required");
    const double dt = specs[0].schedule.delta_t;
    for (const auto& s : specs) {
        if (s.schedule.delta_t != dt) throw InvalidArgument("all bit positions must share one delta_t");
    }
    return dt;
}

}  // namespace

StateVector unobserved_state(std::span<const PropagatorSpec> specs, std::int64_t tick) {
    const double dt = common_delta_t(specs);
    const double t = static_cast<double>(tick) * dt;
    std::vector<AmplitudePair> pairs;
    pairs.reserve(specs.size());
    for (const auto& s : specs) {
        pairs.push_back({s.alpha0 * std::polar(1.0, -s.schedule.phi0.angle(t)),
                         s.alpha1 * std::polar(1.0, -s.schedule.phi1.angle(t))});
    }
    return at_tick(std::move(pairs), tick, dt);
}

std::vector<EncodedTick> encode_trace(const Trace& trace, std::span<const PropagatorSpec> specs) {
    if (specs.size() != trace.width()) {
        throw WidthMismatch("trace of width " + std::to_string(trace.width()) + " needs one spec per bit, got " +
                            std::to_string(specs.size()));
    }
    const double dt = common_delta_t(specs);
    for (const auto& s : specs) Propagator check(s);

    std::vector<EncodedTick> out;
    out.reserve(trace.size());
    for (const auto& o : trace) {
        const auto tick = static_cast<std::int64_t>(o.k);
        const double t = static_cast<double>(tick) * dt;
        std::vector<AmplitudePair> pairs;
        pairs.reserve(specs.size());
        for (std::size_t i = 0; i < specs.size(); ++i) {
            const auto& sched = specs[i].schedule;
            if (o.bits[i] == 0) {
                pairs.push_back({std::polar(1.0, -sched.phi0.angle(t)), Complex{}});
            } else {
                pairs.push_back({Complex{}, std::polar(1.0, -sched.phi1.angle(t))});
            }
        }
        out.push_back(EncodedTick{o.k, t, at_tick(std::move(pairs), tick, dt), unobserved_state(specs, tick)});
    }
    return out;
}

BornFit born_fit(const Trace& trace, std::size_t bit_index) {
    if (trace.empty()) throw InvalidArgument("born fit needs a nonempty trace");
    if (bit_index >= trace.width()) throw InvalidArgument("bit index out of range");
    std::uint64_t ones = 0;
    for (const auto& o : trace) ones += o.bits[bit_index];
    BornFit fit;
    fit.sample_count = trace.size();
    const double n = static_cast<double>(trace.size());
    const double f = static_cast<double>(ones) / n;
    fit.alpha1_sq = f;
    fit.alpha0_sq = 1.0 - f;
    fit.confidence_halfwidth = 3.0 * std::sqrt(f * (1.0 - f) / n);
    return fit;
}

TimeReversalReport time_reversal_check(const Trace& trace, std::span<const PropagatorSpec> specs) {
    TimeReversalReport report;
    const auto reversed = trace.reversed();
    const auto hyp = unrolled_hypothesis(reversed);
    report.reversed_consistent = consistent_with(hyp, reversed);
    report.reversed_hypothesis_size = canonicalize(hyp).size();

    std::vector<Propagator> props;
    props.reserve(specs.size());
    for (auto spec : specs) {
        spec.variant = PropagatorVariant::normalized_phase;
        props.emplace_back(spec);
    }
    for (const auto& tick : encode_trace(trace, specs)) {
        for (const auto* v : {&tick.observed, &tick.unobserved}) {
            const std::span<const Propagator> ps(props);
            const auto back = apply_inverse(ps, quantum::apply(ps, *v));
            for (std::size_t i = 0; i < back.pairs.size(); ++i) {
                report.roundtrip_error = std::max({report.roundtrip_error, std::abs(back.pairs[i].a0 - v->pairs[i].a0),
                                                   std::abs(back.pairs[i].a1 - v->pairs[i].a1)});
            }
        }
    }
    report.roundtrip_ok = report.roundtrip_error <= kAlgebraicTolerance;
    return report;
}

}  // namespace blackbox::quantum
