#include "blackbox/observer.hpp"

#include <cmath>
#include <string>

#include "blackbox/error.hpp"

namespace blackbox::observer {

namespace {

void require_non_negative(double value, const char* name) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
        throw InvalidArgument(std::string(name) + " must be a finite non-negative number");
    }
}

}  // namespace

LandauerCost landauer_action(double n_bits, double temperature, double delta_t) {
    require_non_negative(n_bits, "n_bits");
    require_non_negative(temperature, "temperature");
    require_non_negative(delta_t, "delta_t");
    const double energy = n_bits * kLandauerFactor * kBoltzmann * temperature;
    return {energy, energy * delta_t};
}

double observer_temperature(double theta, double delta_t) {
    require_non_negative(theta, "theta");
    if (!(delta_t > 0.0) || !std::isfinite(delta_t)) {
        throw InvalidArgument("delta_t must be positive");
    }
    return (theta / (kLandauerFactor * kBoltzmann)) / delta_t;
}

ObserverClock::ObserverClock(double delta_t) : delta_t_(delta_t) {
    if (!(delta_t > 0.0) || !std::isfinite(delta_t)) throw InvalidArgument("delta_t must be positive");
}

LandauerLedger::LandauerLedger(double temperature, double delta_t, double efficiency)
    : temperature_(temperature), delta_t_(delta_t), efficiency_(efficiency) {
    require_non_negative(temperature, "temperature");
    if (!(delta_t > 0.0)) throw InvalidArgument("delta_t must be positive");
    if (!(efficiency >= 1.0) || !std::isfinite(efficiency)) {
        throw InvalidArgument("efficiency multiplier must be >= 1");
    }
}

double LandauerLedger::theta() const noexcept {
    return efficiency_ * kLandauerFactor * kBoltzmann * temperature_ * delta_t_;
}

double LandauerLedger::energy_total() const noexcept {
    return energy_after(0);
}

double LandauerLedger::action_total() const noexcept {
    return static_cast<double>(bits_) * theta();
}

double LandauerLedger::energy_after(std::uint64_t bits) const noexcept {
    return efficiency_ * kLandauerFactor * kBoltzmann * temperature_ * static_cast<double>(bits_ + bits);
}

ObserverState::ObserverState(const ObserverConfig& config)
    : n_(config.n),
      clock_(config.delta_t),
      ledger_(config.temperature, config.delta_t, config.efficiency),
      log_(config.n),
      max_energy_(config.max_energy) {
    if (n_ == 0) throw InvalidArgument("observer register width must be positive");
    if (max_energy_ && !(*max_energy_ >= 0.0)) throw InvalidArgument("max_energy must be non-negative");
}

void ObserverState::record(const Bits& bits) {
    if (bits.size() != n_) {
        throw WidthMismatch("observer of width " + std::to_string(n_) + " cannot record a " +
                            std::to_string(bits.size()) + "-bit outcome");
    }
    if (max_energy_ && ledger_.energy_after(n_) > *max_energy_) {
        throw EnergyBudgetExhausted("recording another outcome would spend " + std::to_string(ledger_.energy_after(n_)) +
                                    " J, budget is " + std::to_string(*max_energy_) + " J");
    }
    clock_ = clock_.advanced();
    ledger_ = ledger_.charged(n_);
    log_.append(Outcome{bits, clock_.k()});
}

ObserverState ObserverState::recorded(const Bits& bits) const& {
    ObserverState next = *this;
    next.record(bits);
    return next;
}

ObserverState ObserverState::recorded(const Bits& bits) && {
    record(bits);
    return std::move(*this);
}

std::tuple<ObserverState, boxkit::BoxInstance, Outcome> observe(ObserverState obs, const boxkit::BoxInstance& box) {
    if (box.width() != obs.width()) {
        throw WidthMismatch("observer of width " + std::to_string(obs.width()) + " cannot observe a box of width " +
                            std::to_string(box.width()));
    }
    auto [next_box, out] = boxkit::step(box);
    auto next_obs = std::move(obs).recorded(out.bits);
    // The observer's own clock defines the time index it files the outcome under.
    out.k = next_obs.clock().k();
    return {std::move(next_obs), std::move(next_box), std::move(out)};
}

}  // namespace blackbox::observer
