/**
 * @file multiplier.hpp
 * @brief Partial-product modulo multipliers with carry-save reduction.
 *
 * Both multipliers generate one partial product per multiplier bit and
 * compress them through a Wallace-style tree of 3:2 counters down to a
 * redundant (P_C, P_S) pair; the final carry-propagating step reuses the
 * prefix adders. The mod 2^w-1 tree wraps each stage's carry MSB into bit
 * 0 (2^w = 1 there); the mod 2^w+1 tree wraps it complemented (2^w = -1)
 * and folds the per-stage correction into a constant addend.
 *
 * @license Apache-2.0
 */

#pragma once

#include <cstdint>
#include <vector>

#include "rnsnet/bitvec.hpp"
#include "rnsnet/hw/prefix_adder.hpp"

namespace rnsnet::hw {

/// Carry-save multiplier output: (carry + sum) mod m equals the product.
struct RedundantProduct {
    BitVec carry;  ///< P_C
    BitVec sum;    ///< P_S

    friend bool operator==(const RedundantProduct&, const RedundantProduct&) = default;
};

namespace detail {

struct CsaWords {
    std::uint64_t sum;
    std::uint64_t carry;
};

/// 3:2 counter with the carry MSB rotated into bit 0 (mod 2^w-1 wiring).
inline CsaWords csa_m1(std::uint64_t u, std::uint64_t v, std::uint64_t t, unsigned w) {
    const std::uint64_t mask = (std::uint64_t{1} << w) - 1;
    const std::uint64_t s = u ^ v ^ t;
    const std::uint64_t c = (u & v) | (u & t) | (v & t);
    const std::uint64_t wrapped = ((c << 1) | (c >> (w - 1))) & mask;
    return CsaWords{s, wrapped};
}

/// 3:2 counter with the carry MSB wrapped complemented (mod 2^w+1 wiring).
/// Each application is off by exactly -1, compensated in the constant addend.
inline CsaWords csa_p1(std::uint64_t u, std::uint64_t v, std::uint64_t t, unsigned w) {
    const std::uint64_t mask = (std::uint64_t{1} << w) - 1;
    const std::uint64_t s = u ^ v ^ t;
    const std::uint64_t c = (u & v) | (u & t) | (v & t);
    const std::uint64_t c_high = c >> (w - 1);
    const std::uint64_t wrapped = (((c << 1) & mask) | (c_high ^ 1)) & mask;
    return CsaWords{s, wrapped};
}

template <typename Stage>
inline void reduce_to_two(std::vector<std::uint64_t>& words, unsigned w, Stage stage) {
    while (words.size() > 2) {
        std::vector<std::uint64_t> next;
        next.reserve(words.size() - words.size() / 3);
        std::size_t i = 0;
        for (; i + 3 <= words.size(); i += 3) {
            const CsaWords out = stage(words[i], words[i + 1], words[i + 2], w);
            next.push_back(out.sum);
            next.push_back(out.carry);
        }
        for (; i < words.size(); ++i) next.push_back(words[i]);
        words = std::move(next);
    }
    while (words.size() < 2) words.push_back(0);
}

/// Circular left shift of y by i with the wrapped bits complemented:
/// congruent to y*2^i + (2^i - 1) mod 2^w+1.
inline std::uint64_t rot_complement(std::uint64_t y, unsigned i, unsigned w) {
    if (i == 0) return y;
    const std::uint64_t low = y & ((std::uint64_t{1} << (w - i)) - 1);
    const std::uint64_t high = y >> (w - i);
    return (low << i) | (((std::uint64_t{1} << i) - 1) & ~high);
}

}  // namespace detail

/**
 * @brief Partial products of x*y mod 2^w-1, reduced to carry-save form.
 *
 * PP_i is y circularly rotated left by i, gated by bit i of x.
 */
inline RedundantProduct mul_m1(const BitVec& x, const BitVec& y) {
    rnsnet::detail::require_same_width(x, y, "mul_m1");
    if (x.all_ones() || y.all_ones())
        throw std::invalid_argument("mul_m1: operand not a canonical residue mod 2^w-1");
    const unsigned w = x.width;

    std::vector<std::uint64_t> words;
    words.reserve(w);
    for (unsigned i = 0; i < w; ++i)
        words.push_back(x.bit(i) ? y.rotl(i).value() : 0);
    detail::reduce_to_two(words, w, detail::csa_m1);
    return RedundantProduct{BitVec{w, words[1]}, BitVec{w, words[0]}};
}

/// Final carry-propagating add for a mod 2^w-1 redundant pair. The CSA words
/// may carry the all-ones alias, so this feeds the raw end-around core.
inline BitVec finalize_m1(const RedundantProduct& rp) {
    rnsnet::detail::require_same_width(rp.carry, rp.sum, "finalize_m1");
    return detail::eac_add_raw(rp.carry, rp.sum);
}

/**
 * @brief Partial products of x*y mod 2^w+1, reduced to carry-save form.
 *
 * Operands are (w+1)-bit normal-representation residues (values up to 2^w).
 * The values 0 and 2^w cannot enter the w-bit core and bypass it: 0 forces
 * a zero product, 2^w = -1 negates the other operand. In the core, bit i of
 * x selects between the complemented circular shift of y and the constant
 * 0..01..1 word; the remaining exactness correction, merged with the -1 per
 * CSA stage, is the constant addend 2.
 */
inline RedundantProduct mul_p1(const BitVec& x, const BitVec& y) {
    rnsnet::detail::require_same_width(x, y, "mul_p1");
    if (x.width < 2) throw std::invalid_argument("mul_p1: operands need w+1 >= 2 bits");
    const unsigned w = x.width - 1;
    const std::uint64_t top = std::uint64_t{1} << w;
    const std::uint64_t m = top + 1;
    if (x.value() > top || y.value() > top)
        throw std::invalid_argument("mul_p1: operand not a canonical residue mod 2^w+1");

    const BitVec zero = BitVec::zeros(w + 1);
    if (x.value() == 0 || y.value() == 0)
        return RedundantProduct{zero, zero};
    if (x.value() == top)  // x = -1: product is -y
        return RedundantProduct{zero, BitVec::of(m - y.value(), w + 1)};
    if (y.value() == top)
        return RedundantProduct{zero, BitVec::of(m - x.value(), w + 1)};

    std::vector<std::uint64_t> words;
    words.reserve(w + 2);
    for (unsigned i = 0; i < w; ++i)
        words.push_back(x.bit(i) ? detail::rot_complement(y.value(), i, w)
                                 : (std::uint64_t{1} << i) - 1);
    words.push_back(2);  // exactness correction, already net of CSA stage offsets
    words.push_back(0);
    detail::reduce_to_two(words, w, detail::csa_p1);
    return RedundantProduct{BitVec{w, words[1]}.zext(w + 1), BitVec{w, words[0]}.zext(w + 1)};
}

/// Final carry-propagating add for a mod 2^w+1 redundant pair.
inline BitVec finalize_p1(const RedundantProduct& rp) {
    return add_p1(rp.carry, rp.sum);
}

}  // namespace rnsnet::hw
