/**
 * @file bitvec.hpp
 * @brief Fixed-width bit vector, the carrier type for all circuit models.
 * @license Apache-2.0
 */

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rnsnet {

/// Fixed-width bit vector, bit 0 = LSB. Width is part of the value: every
/// circuit operation declares and checks the widths it accepts.
struct BitVec {
    unsigned width{};
    std::uint64_t bits{};  // invariant: bits >> width == 0

    static BitVec of(std::uint64_t value, unsigned width) {
        if (width == 0 || width > 63)
            throw std::invalid_argument("BitVec: width must be in [1, 63]");
        if (width < 64 && (value >> width) != 0)
            throw std::invalid_argument("BitVec: value " + std::to_string(value) +
                                        " does not fit in " + std::to_string(width) + " bits");
        return BitVec{width, value};
    }

    static BitVec zeros(unsigned width) { return of(0, width); }

    std::uint64_t value() const { return bits; }
    std::uint64_t mask() const { return (std::uint64_t{1} << width) - 1; }

    bool bit(unsigned i) const {
        if (i >= width) throw std::invalid_argument("BitVec::bit: index out of range");
        return (bits >> i) & 1;
    }

    bool all_ones() const { return bits == mask(); }

    /// Bitwise complement within the declared width (one's complement).
    BitVec complement() const { return BitVec{width, ~bits & mask()}; }

    BitVec rotl(unsigned k) const {
        k %= width;
        if (k == 0) return *this;
        return BitVec{width, ((bits << k) | (bits >> (width - k))) & mask()};
    }

    BitVec rotr(unsigned k) const { return rotl(width - k % width); }

    /// Low `count` bits starting at `lo`, as a new vector of width `count`.
    BitVec slice(unsigned lo, unsigned count) const {
        if (lo + count > width)
            throw std::invalid_argument("BitVec::slice: range exceeds width");
        return of((bits >> lo) & ((std::uint64_t{1} << count) - 1), count);
    }

    /// Same bits, wider vector (zero extension).
    BitVec zext(unsigned new_width) const {
        if (new_width < width)
            throw std::invalid_argument("BitVec::zext: cannot narrow");
        return of(bits, new_width);
    }

    friend bool operator==(const BitVec&, const BitVec&) = default;
};

namespace detail {

inline void require_same_width(const BitVec& a, const BitVec& b, const char* where) {
    if (a.width != b.width)
        throw std::invalid_argument(std::string(where) + ": operand widths differ (" +
                                    std::to_string(a.width) + " vs " + std::to_string(b.width) + ")");
}

}  // namespace detail

}  // namespace rnsnet
