#pragma once

#include <cstdint>
#include <string_view>

namespace blackbox {

// SplitMix64 (Steele, Lea & Flood 2014). State is a single word, so generators
// are cheap to copy into immutable box values.
class SplitMix64 {
public:
    static constexpr std::string_view kName = "splitmix64/1";

    constexpr explicit SplitMix64(std::uint64_t seed = 0) noexcept : state_(seed) {}

    constexpr std::uint64_t next() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    // Uniform double in [0, 1) built from the top 53 bits.
    constexpr double next_unit() noexcept {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    constexpr bool next_bit() noexcept { return (next() >> 63) != 0; }

    constexpr std::uint64_t state() const noexcept { return state_; }

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

// Deterministic child seed for a named component of a run ("box", "resampler", ...).
std::uint64_t derive_seed(std::uint64_t root, std::string_view component) noexcept;

// Deterministic child seed for the index-th member of a family (resampling attempts, trials).
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) noexcept;

}  // namespace blackbox
