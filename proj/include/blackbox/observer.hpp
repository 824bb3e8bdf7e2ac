#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <tuple>

#include "blackbox/bits.hpp"
#include "blackbox/boxkit.hpp"

namespace blackbox::observer {

// CODATA 2018 exact value, J/K.
inline constexpr double kBoltzmann = 1.380649e-23;
// Free-energy cost of recording one bit, in units of k_B T.
inline constexpr double kLandauerFactor = 0.7;

struct LandauerCost {
    double energy;  // J
    double action;  // J*s
};

// Energy and action needed to record n_bits at temperature T with recording interval delta_t.
LandauerCost landauer_action(double n_bits, double temperature, double delta_t);

// Temperature implied by a per-bit action quantum: T = (theta / (0.7 k_B)) / delta_t.
double observer_temperature(double theta, double delta_t);

// Observer-relative clock: time is the outcome count times a fixed interval.
class ObserverClock {
public:
    explicit ObserverClock(double delta_t);

    double delta_t() const noexcept { return delta_t_; }
    std::uint64_t k() const noexcept { return k_; }
    double t() const noexcept { return static_cast<double>(k_) * delta_t_; }

    ObserverClock advanced() const noexcept {
        ObserverClock c = *this;
        ++c.k_;
        return c;
    }

private:
    double delta_t_;
    std::uint64_t k_ = 0;
};

// Energy/action bookkeeping. Totals are derived from the bit count so they stay
// linear in it by construction.
class LandauerLedger {
public:
    LandauerLedger(double temperature, double delta_t, double efficiency = 1.0);

    double temperature() const noexcept { return temperature_; }
    double efficiency() const noexcept { return efficiency_; }
    std::uint64_t bits_recorded() const noexcept { return bits_; }
    // Per-bit action quantum, J*s.
    double theta() const noexcept;
    double energy_total() const noexcept;
    double action_total() const noexcept;
    // Energy that recording `bits` more would bring the total to.
    double energy_after(std::uint64_t bits) const noexcept;

    LandauerLedger charged(std::uint64_t bits) const noexcept {
        LandauerLedger l = *this;
        l.bits_ += bits;
        return l;
    }

private:
    double temperature_;
    double delta_t_;
    double efficiency_;
    std::uint64_t bits_ = 0;
};

struct ObserverConfig {
    std::size_t n = 1;
    double delta_t = 1.0;        // s
    double temperature = 300.0;  // K
    std::optional<double> max_energy;  // J
    double efficiency = 1.0;     // reserved; observers are modelled as optimal
};

// A finite observer: n-bit register, clock, ledger and append-only log.
class ObserverState {
public:
    explicit ObserverState(const ObserverConfig& config);

    std::size_t width() const noexcept { return n_; }
    const ObserverClock& clock() const noexcept { return clock_; }
    const LandauerLedger& ledger() const noexcept { return ledger_; }
    const Trace& log() const noexcept { return log_; }
    const std::optional<double>& max_energy() const noexcept { return max_energy_; }

    // Records an outcome delivered by the environment, charging n bits.
    // Throws WidthMismatch or EnergyBudgetExhausted; the state is untouched on error.
    ObserverState recorded(const Bits& bits) const&;
    ObserverState recorded(const Bits& bits) &&;

private:
    void record(const Bits& bits);

    std::size_t n_;
    ObserverClock clock_;
    LandauerLedger ledger_;
    Trace log_;
    std::optional<double> max_energy_;
};

// One O-B interaction: steps the box, records its outcome, advances the clock.
// Pass the observer as an rvalue to avoid copying its log on long runs.
std::tuple<ObserverState, boxkit::BoxInstance, Outcome> observe(ObserverState obs, const boxkit::BoxInstance& box);

}  // namespace blackbox::observer
