/**
 * @file parity_circuit.hpp
 * @brief Combinational parity extractor for an RNS tuple.
 *
 * Bit-level realization of the word-level rns_parity: additive inverses
 * come from bitwise inverters, the multiplications by 2^(n-1) and 2^n in
 * the pair-lift equations are single right rotates, and the final
 * (X1 - X2) mod 2^(2n)-1 needs only one folding addition because X2 is at
 * most two bits wider than the modulus.
 *
 * @license Apache-2.0
 */

#pragma once

#include <cstdint>

#include "rnsnet/bitvec.hpp"
#include "rnsnet/hw/prefix_adder.hpp"
#include "rnsnet/rns_core.hpp"

namespace rnsnet::hw {

/**
 * @brief Parity bit of the value represented by (x1, x1s, x2, x2s).
 *
 * Residue widths must be the canonical n, n+1, n+1, n+2. Result equals
 * rns_parity for every consistent tuple.
 */
inline unsigned parity_circuit(const BitVec& x1, const BitVec& x1s, const BitVec& x2,
                               const BitVec& x2s, const ModuliSet& ms) {
    const unsigned n = ms.n;
    if (x1.width != n || x1s.width != n + 1 || x2.width != n + 1 || x2s.width != n + 2)
        throw std::invalid_argument("parity_circuit: residue widths must be n, n+1, n+1, n+2");
    if (x1.all_ones() || x1s.value() > (std::uint64_t{1} << n) ||
        x2.all_ones() || x2s.value() > (std::uint64_t{1} << (n + 1)))
        throw std::invalid_argument("parity_circuit: residue not canonical");

    // X1 = x1s + (2^n+1) * (2^(n-1)(x1 - x1s) mod 2^n-1), a 2n-bit word.
    const BitVec x1s_folded =
        detail::eac_add_raw(x1s.slice(0, n), x1s.slice(n, 1).zext(n));  // x1s mod 2^n-1
    const BitVec t1 = detail::eac_add_raw(x1, x1s_folded.complement());
    const BitVec k1 = t1.rotr(1);  // times 2^(n-1) mod 2^n-1
    const std::uint64_t lift1 = x1s.value() + ((k1.value() << n) + k1.value());

    // X2 = x2s + (2^(n+1)+1) * (2^n(x2 - x2s) mod 2^(n+1)-1), a (2n+2)-bit word.
    const BitVec x2s_folded =
        detail::eac_add_raw(x2s.slice(0, n + 1), x2s.slice(n + 1, 1).zext(n + 1));
    const BitVec t2 = detail::eac_add_raw(x2, x2s_folded.complement());
    const BitVec k2 = t2.rotr(1);  // times 2^n mod 2^(n+1)-1
    const std::uint64_t lift2 = x2s.value() + ((k2.value() << (n + 1)) + k2.value());

    // (X1 - X2) mod 2^(2n)-1: fold X2's top two bits down, invert, add.
    const BitVec lift2_vec = BitVec::of(lift2, 2 * n + 2);
    const BitVec x2_mod_a =
        detail::eac_add_raw(lift2_vec.slice(0, 2 * n), lift2_vec.slice(2 * n, 2).zext(2 * n));
    const BitVec d = detail::eac_add_raw(BitVec::of(lift1, 2 * n), x2_mod_a.complement());

    return static_cast<unsigned>((lift2 ^ d.value()) & 1);
}

/// Convenience entry point from a word-level tuple.
inline unsigned parity_circuit(const RnsInt& x, const ModuliSet& ms) {
    return parity_circuit(BitVec::of(x.r1, ms.n), BitVec::of(x.r1s, ms.n + 1),
                          BitVec::of(x.r2, ms.n + 1), BitVec::of(x.r2s, ms.n + 2), ms);
}

}  // namespace rnsnet::hw
