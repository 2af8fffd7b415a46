/**
 * @file residue_gen.hpp
 * @brief Residue generation by periodic folding of binary weights.
 *
 * For 2^k-1 the binary weights repeat with period k, so the input splits
 * into k-bit chunks that a tree of end-around adders folds together. For
 * 2^k+1 the weight of 2^k is -1, so consecutive chunks alternate sign:
 * chunk pairs combine as (even - odd) and the differences tree-add.
 *
 * @license Apache-2.0
 */

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "rnsnet/bitvec.hpp"
#include "rnsnet/hw/prefix_adder.hpp"
#include "rnsnet/rns_core.hpp"

namespace rnsnet::hw {

/// Which of the four conjugate moduli a block reduces by.
enum class Residue { m1, m1s, m2, m2s };

namespace detail {

inline std::vector<std::uint64_t> chunks_of(const BitVec& x, unsigned k) {
    std::vector<std::uint64_t> out;
    const std::uint64_t mask = (std::uint64_t{1} << k) - 1;
    std::uint64_t v = x.value();
    for (unsigned consumed = 0; consumed < x.width; consumed += k) {
        out.push_back(v & mask);
        v >>= k;
    }
    return out;
}

/// Additive inverse mod 2^k+1 of a k-bit chunk: the bitwise inverter plus 2
/// (zero stays zero, the one value the inverter trick cannot produce).
inline BitVec negate_chunk_p1(std::uint64_t chunk, unsigned k) {
    if (chunk == 0) return BitVec::zeros(k + 1);
    const std::uint64_t inverted = ~chunk & ((std::uint64_t{1} << k) - 1);
    return BitVec::of(inverted + 2, k + 1);
}

inline BitVec fold_m1(const std::vector<std::uint64_t>& chunks, unsigned k) {
    std::vector<BitVec> level;
    level.reserve(chunks.size());
    for (std::uint64_t c : chunks) level.push_back(BitVec{k, c});
    while (level.size() > 1) {
        std::vector<BitVec> next;
        for (std::size_t i = 0; i < level.size(); i += 2)
            next.push_back(i + 1 < level.size() ? eac_add_raw(level[i], level[i + 1]) : level[i]);
        level = std::move(next);
    }
    return level.front();
}

inline BitVec fold_p1(const std::vector<std::uint64_t>& chunks, unsigned k) {
    // Pair up with alternating signs; 2^(2k) is +1 again, so pair results add.
    std::vector<BitVec> level;
    for (std::size_t i = 0; i < chunks.size(); i += 2) {
        const BitVec even = BitVec::of(chunks[i], k + 1);
        if (i + 1 < chunks.size())
            level.push_back(add_p1(even, negate_chunk_p1(chunks[i + 1], k)));
        else
            level.push_back(even);
    }
    while (level.size() > 1) {
        std::vector<BitVec> next;
        for (std::size_t i = 0; i < level.size(); i += 2)
            next.push_back(i + 1 < level.size() ? add_p1(level[i], level[i + 1]) : level[i]);
        level = std::move(next);
    }
    return level.front();
}

}  // namespace detail

/**
 * @brief Reduces a full-range input to one residue through the folding tree.
 *
 * The input must be the binary form of a value in [0, M), exactly
 * ms.value_bits wide. The output vector has the residue's canonical width
 * (n, n+1, n+1 or n+2 bits).
 */
inline BitVec residue_gen(const BitVec& x, Residue which, const ModuliSet& ms) {
    if (x.width != ms.value_bits)
        throw std::invalid_argument("residue_gen: input must be " + std::to_string(ms.value_bits) +
                                    " bits wide, got " + std::to_string(x.width));
    if (x.value() >= ms.M)
        throw std::invalid_argument("residue_gen: input value outside [0, M)");

    switch (which) {
        case Residue::m1: return detail::fold_m1(detail::chunks_of(x, ms.n), ms.n);
        case Residue::m2: return detail::fold_m1(detail::chunks_of(x, ms.n + 1), ms.n + 1);
        case Residue::m1s: return detail::fold_p1(detail::chunks_of(x, ms.n), ms.n);
        case Residue::m2s: return detail::fold_p1(detail::chunks_of(x, ms.n + 1), ms.n + 1);
    }
    throw std::invalid_argument("residue_gen: unknown modulus kind");
}

/// The full input converter: all four residue generators side by side.
inline std::array<BitVec, 4> convert_to_rns(const BitVec& x, const ModuliSet& ms) {
    return {residue_gen(x, Residue::m1, ms), residue_gen(x, Residue::m1s, ms),
            residue_gen(x, Residue::m2, ms), residue_gen(x, Residue::m2s, ms)};
}

}  // namespace rnsnet::hw
