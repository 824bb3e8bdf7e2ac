#include "blackbox/bits.hpp"

#include "blackbox/error.hpp"

namespace blackbox {

Bits parse_bits(std::string_view text) {
    Bits bits;
    bits.reserve(text.size());
    for (char c : text) {
        if (c != '0' && c != '1') {
            throw InvalidArgument("bit string may only contain '0' and '1': \"" + std::string(text) + "\"");
        }
        bits.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return bits;
}

std::string to_string(std::span<const std::uint8_t> bits) {
    std::string out;
    out.reserve(bits.size());
    for (auto b : bits) out.push_back(b ? '1' : '0');
    return out;
}

std::uint64_t to_integer(std::span<const std::uint8_t> bits) {
    std::uint64_t value = 0;
    for (auto b : bits) value = (value << 1) | (b ? 1U : 0U);
    return value;
}

Bits from_integer(std::uint64_t value, std::size_t width) {
    Bits bits(width, 0);
    for (std::size_t i = 0; i < width; ++i) {
        bits[width - 1 - i] = static_cast<std::uint8_t>((value >> i) & 1U);
    }
    return bits;
}

Trace Trace::from_bits(std::size_t width, const std::vector<Bits>& rows) {
    Trace trace(width);
    for (const auto& row : rows) trace.append_bits(row);
    return trace;
}

Trace Trace::from_strings(std::size_t width, const std::vector<std::string>& rows) {
    Trace trace(width);
    for (const auto& row : rows) trace.append_bits(parse_bits(row));
    return trace;
}

void Trace::append(Outcome outcome) {
    if (outcome.bits.size() != width_) {
        throw WidthMismatch("outcome of width " + std::to_string(outcome.bits.size()) +
                            " appended to trace of width " + std::to_string(width_));
    }
    if (outcome.k != outcomes_.size() + 1) {
        throw InvalidArgument("trace expects time index " + std::to_string(outcomes_.size() + 1) +
                              ", got " + std::to_string(outcome.k));
    }
    outcomes_.push_back(std::move(outcome));
}

void Trace::append_bits(Bits bits) {
    append(Outcome{std::move(bits), outcomes_.size() + 1});
}

Trace Trace::columns(std::size_t first, std::size_t count) const {
    if (first + count > width_) {
        throw InvalidArgument("column range exceeds trace width");
    }
    Trace out(count);
    out.outcomes_.reserve(outcomes_.size());
    for (const auto& o : outcomes_) {
        out.outcomes_.push_back(Outcome{Bits(o.bits.begin() + first, o.bits.begin() + first + count), o.k});
    }
    return out;
}

Trace Trace::select(std::span<const std::size_t> positions) const {
    for (auto p : positions) {
        if (p >= width_) throw InvalidArgument("bit position " + std::to_string(p) + " out of range");
    }
    Trace out(positions.size());
    out.outcomes_.reserve(outcomes_.size());
    for (const auto& o : outcomes_) {
        Bits bits;
        bits.reserve(positions.size());
        for (auto p : positions) bits.push_back(o.bits[p]);
        out.outcomes_.push_back(Outcome{std::move(bits), o.k});
    }
    return out;
}

Trace Trace::prefix(std::size_t length) const {
    if (length > outcomes_.size()) throw InvalidArgument("prefix longer than trace");
    Trace out(width_);
    out.outcomes_.assign(outcomes_.begin(), outcomes_.begin() + static_cast<std::ptrdiff_t>(length));
    return out;
}

Trace Trace::reversed() const {
    Trace out(width_);
    for (auto it = outcomes_.rbegin(); it != outcomes_.rend(); ++it) out.append_bits(it->bits);
    return out;
}

std::vector<Bits> Trace::rows() const {
    std::vector<Bits> out;
    out.reserve(outcomes_.size());
    for (const auto& o : outcomes_) out.push_back(o.bits);
    return out;
}

}  // namespace blackbox
