#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace blackbox {

// One outcome register: each entry is 0 or 1.
using Bits = std::vector<std::uint8_t>;

// Parses "1010" into bits; throws InvalidArgument on any other character.
Bits parse_bits(std::string_view text);
std::string to_string(std::span<const std::uint8_t> bits);

// Big-endian integer value of a bit string (first bit is most significant).
std::uint64_t to_integer(std::span<const std::uint8_t> bits);
Bits from_integer(std::uint64_t value, std::size_t width);

struct Outcome {
    Bits bits;
    std::uint64_t k = 0;  // 1-based time index

    friend bool operator==(const Outcome&, const Outcome&) = default;
};

// A finite record of outcomes of fixed width with consecutive time indices 1..N.
class Trace {
public:
    explicit Trace(std::size_t width) : width_(width) {}

    // Builds a trace from raw bit strings, assigning k = 1..N.
    static Trace from_bits(std::size_t width, const std::vector<Bits>& rows);
    // Convenience for tests and configs: {"10", "01", ...}.
    static Trace from_strings(std::size_t width, const std::vector<std::string>& rows);

    // Appends the next outcome. Rejects width changes and out-of-order time indices.
    void append(Outcome outcome);
    void append_bits(Bits bits);

    std::size_t width() const noexcept { return width_; }
    std::size_t size() const noexcept { return outcomes_.size(); }
    bool empty() const noexcept { return outcomes_.empty(); }
    const Outcome& operator[](std::size_t i) const { return outcomes_[i]; }
    const std::vector<Outcome>& outcomes() const noexcept { return outcomes_; }
    auto begin() const noexcept { return outcomes_.begin(); }
    auto end() const noexcept { return outcomes_.end(); }

    // Column projection: keeps bit positions [first, first + count) (0-based).
    Trace columns(std::size_t first, std::size_t count) const;
    // Column projection onto an arbitrary ordered set of bit positions.
    Trace select(std::span<const std::size_t> positions) const;
    // First `length` outcomes.
    Trace prefix(std::size_t length) const;
    // Same outcomes read backwards, re-indexed 1..N.
    Trace reversed() const;

    std::vector<Bits> rows() const;

    friend bool operator==(const Trace&, const Trace&) = default;

private:
    std::size_t width_;
    std::vector<Outcome> outcomes_;
};

}  // namespace blackbox
