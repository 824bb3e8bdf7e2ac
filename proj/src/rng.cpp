#include "blackbox/rng.hpp"

namespace blackbox {

namespace {

// FNV-1a, used only to turn component names into stream identifiers.
constexpr std::uint64_t fnv1a(std::string_view text) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t root, std::string_view component) noexcept {
    return SplitMix64::mix(SplitMix64::mix(root) ^ fnv1a(component));
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) noexcept {
    return SplitMix64::mix(SplitMix64::mix(root + 0x632BE59BD9B4E019ULL) ^ SplitMix64::mix(index));
}

}  // namespace blackbox
