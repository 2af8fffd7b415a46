/**
 * @file rns_core.hpp
 * @brief Word-level Residue Number System over the conjugate moduli set
 *        {2^n-1, 2^n+1, 2^(n+1)-1, 2^(n+1)+1}.
 *
 * Conversion in/out, ring arithmetic, parity extraction, parity-based
 * comparison, half-comparator ReLU and argmax. All functions are pure and
 * operate on plain value types; nothing here touches global state.
 *
 * @license Apache-2.0
 */

#pragma once

#include <array>
#include <bit>
#include <cassert>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

namespace rnsnet {

/// One integer in [0, M) as its four residues (x1, x1*, x2, x2*).
/// Canonical form: each residue strictly below its modulus.
struct RnsInt {
    std::uint64_t r1{};   ///< mod 2^n - 1
    std::uint64_t r1s{};  ///< mod 2^n + 1
    std::uint64_t r2{};   ///< mod 2^(n+1) - 1
    std::uint64_t r2s{};  ///< mod 2^(n+1) + 1

    friend bool operator==(const RnsInt&, const RnsInt&) = default;
};

/// Signed interpretation of an RnsInt: values in [0, (M-1)/2] are themselves,
/// values in [(M+1)/2, M-1] stand for value - M.
using SignedValue = std::int64_t;

/**
 * @brief The conjugate moduli 4-tuple for a given n, with derived constants.
 *
 * m1*m1s = 2^(2n)-1 and m2*m2s = 2^(2n+2)-1 share exactly the factor 3, so
 * the dynamic range is M = (2^(2n)-1)(2^(2n+2)-1)/3 and M is odd. The
 * half-comparator constants (threshold parity and the encoded additive
 * inverse of the threshold) are precomputed here.
 */
struct ModuliSet {
    unsigned n{};
    std::uint64_t m1{}, m1s{}, m2{}, m2s{};
    std::uint64_t M{};        ///< dynamic range, lcm of the four moduli
    std::uint64_t pos_max{};  ///< (M-1)/2, largest value read as non-negative

    // Half-comparator constants. neg_threshold = (M+1)/2 is the smallest
    // value read as negative; its additive inverse mod M equals pos_max.
    std::uint64_t neg_threshold{};
    unsigned threshold_parity{};
    RnsInt threshold_inverse{};  ///< encode(pos_max), reused as argmax offset

    std::array<unsigned, 4> residue_bits{};  ///< {n, n+1, n+1, n+2}
    unsigned value_bits{};                   ///< bits needed for any value in [0, M)

    friend bool operator==(const ModuliSet&, const ModuliSet&) = default;
};

namespace detail {

/// Floor modulus: result in [0, m) for any signed v.
inline std::uint64_t mod_floor(std::int64_t v, std::uint64_t m) {
    std::int64_t r = v % static_cast<std::int64_t>(m);
    if (r < 0) r += static_cast<std::int64_t>(m);
    return static_cast<std::uint64_t>(r);
}

/// Modular inverse by extended Euclid; requires gcd(a, m) == 1.
inline std::uint64_t inv_mod(std::uint64_t a, std::uint64_t m) {
    std::int64_t t = 0, new_t = 1;
    std::int64_t r = static_cast<std::int64_t>(m), new_r = static_cast<std::int64_t>(a % m);
    while (new_r != 0) {
        std::int64_t q = r / new_r;
        std::int64_t tmp = t - q * new_t;
        t = new_t;
        new_t = tmp;
        tmp = r - q * new_r;
        r = new_r;
        new_r = tmp;
    }
    assert(r == 1 && "inv_mod: arguments not coprime");
    return mod_floor(t, m);
}

/// CRT lift for a coprime pair: the unique X mod (ma*mb) with the given residues.
inline std::uint64_t crt_pair(std::uint64_t ra, std::uint64_t ma,
                              std::uint64_t rb, std::uint64_t mb) {
    std::uint64_t d = mod_floor(static_cast<std::int64_t>(rb) - static_cast<std::int64_t>(ra), mb);
    std::uint64_t k = (d * inv_mod(ma % mb, mb)) % mb;
    return ra + ma * k;
}

inline bool canonical(const RnsInt& r, const ModuliSet& ms) {
    return r.r1 < ms.m1 && r.r1s < ms.m1s && r.r2 < ms.m2 && r.r2s < ms.m2s;
}

}  // namespace detail

/**
 * @brief Builds the moduli set for parameter n.
 *
 * n must lie in [2, 15]: n=1 degenerates (m1 = 1) and n > 15 would push
 * intermediate products past 64 bits.
 */
inline ModuliSet make_moduli_set(unsigned n) {
    if (n < 2)
        throw std::invalid_argument("make_moduli_set: n must be >= 2 (n=1 gives the degenerate modulus 1)");
    if (n > 15)
        throw std::invalid_argument("make_moduli_set: n must be <= 15 to keep 64-bit arithmetic exact");

    ModuliSet ms;
    ms.n = n;
    ms.m1 = (std::uint64_t{1} << n) - 1;
    ms.m1s = (std::uint64_t{1} << n) + 1;
    ms.m2 = (std::uint64_t{1} << (n + 1)) - 1;
    ms.m2s = (std::uint64_t{1} << (n + 1)) + 1;

    const std::uint64_t a = ms.m1 * ms.m1s;   // 2^(2n) - 1, divisible by 3
    const std::uint64_t b = ms.m2 * ms.m2s;   // 2^(2n+2) - 1
    ms.M = (a / 3) * b;
    ms.pos_max = (ms.M - 1) / 2;
    ms.neg_threshold = ms.pos_max + 1;
    ms.threshold_parity = static_cast<unsigned>(ms.neg_threshold & 1);
    ms.threshold_inverse = RnsInt{ms.pos_max % ms.m1, ms.pos_max % ms.m1s,
                                  ms.pos_max % ms.m2, ms.pos_max % ms.m2s};
    ms.residue_bits = {n, n + 1, n + 1, n + 2};
    ms.value_bits = static_cast<unsigned>(std::bit_width(ms.M - 1));
    return ms;
}

/// Residues of x for every modulus. Requires 0 <= x < M.
inline RnsInt encode(std::uint64_t x, const ModuliSet& ms) {
    if (x >= ms.M)
        throw std::out_of_range("encode: value " + std::to_string(x) + " outside [0, M=" +
                                std::to_string(ms.M) + ")");
    return RnsInt{x % ms.m1, x % ms.m1s, x % ms.m2, x % ms.m2s};
}

/**
 * @brief Recovers the unique x in [0, M) from a residue tuple.
 *
 * m1s and m2 (or m1 and m2s, depending on the parity of n) share the factor
 * 3, so plain 4-way CRT does not apply. Each conjugate pair is coprime and
 * lifts on its own; the two lifted halves must then agree mod 3, which is
 * the consistency condition for a preimage to exist.
 */
inline std::uint64_t decode(const RnsInt& r, const ModuliSet& ms) {
    if (!detail::canonical(r, ms))
        throw std::invalid_argument("decode: residue tuple not canonical (some residue >= its modulus)");

    const std::uint64_t a = ms.m1 * ms.m1s;
    const std::uint64_t b = ms.m2 * ms.m2s;
    const std::uint64_t x1 = detail::crt_pair(r.r1, ms.m1, r.r1s, ms.m1s);  // x mod 2^(2n)-1
    const std::uint64_t x2 = detail::crt_pair(r.r2, ms.m2, r.r2s, ms.m2s);  // x mod 2^(2n+2)-1

    if (x1 % 3 != x2 % 3)
        throw std::domain_error("decode: inconsistent residues, lifted halves disagree mod 3 "
                                "(no preimage exists)");

    // x = x1 + a*t with (a/3)*t = (x2-x1)/3 (mod b/3); a/3 and b/3 are coprime.
    const std::uint64_t b3 = b / 3;
    const std::int64_t diff = static_cast<std::int64_t>(x2) - static_cast<std::int64_t>(x1);
    const std::uint64_t d3 = detail::mod_floor(diff / 3, b3);
    const std::uint64_t t = (d3 * detail::inv_mod((a / 3) % b3, b3)) % b3;
    return x1 + a * t;
}

/// Wrap-around encoding of a signed value; requires |v| <= (M-1)/2.
inline RnsInt encode_signed(SignedValue v, const ModuliSet& ms) {
    const std::int64_t bound = static_cast<std::int64_t>(ms.pos_max);
    if (v > bound || v < -bound)
        throw std::out_of_range("encode_signed: |" + std::to_string(v) + "| exceeds (M-1)/2 = " +
                                std::to_string(ms.pos_max));
    const std::uint64_t x = v < 0 ? ms.M - static_cast<std::uint64_t>(-v) : static_cast<std::uint64_t>(v);
    return encode(x, ms);
}

/// Signed interpretation: values above (M-1)/2 wrap to value - M.
inline SignedValue decode_signed(const RnsInt& r, const ModuliSet& ms) {
    const std::uint64_t x = decode(r, ms);
    if (x > ms.pos_max)
        return static_cast<SignedValue>(x) - static_cast<SignedValue>(ms.M);
    return static_cast<SignedValue>(x);
}

/// Element-wise ring operations. Operands must be canonical under ms.
inline RnsInt rns_add(const RnsInt& a, const RnsInt& b, const ModuliSet& ms) {
    assert(detail::canonical(a, ms) && detail::canonical(b, ms));
    return RnsInt{(a.r1 + b.r1) % ms.m1, (a.r1s + b.r1s) % ms.m1s,
                  (a.r2 + b.r2) % ms.m2, (a.r2s + b.r2s) % ms.m2s};
}

inline RnsInt rns_sub(const RnsInt& a, const RnsInt& b, const ModuliSet& ms) {
    assert(detail::canonical(a, ms) && detail::canonical(b, ms));
    return RnsInt{(a.r1 + ms.m1 - b.r1) % ms.m1, (a.r1s + ms.m1s - b.r1s) % ms.m1s,
                  (a.r2 + ms.m2 - b.r2) % ms.m2, (a.r2s + ms.m2s - b.r2s) % ms.m2s};
}

inline RnsInt rns_neg(const RnsInt& a, const ModuliSet& ms) {
    assert(detail::canonical(a, ms));
    return RnsInt{(ms.m1 - a.r1) % ms.m1, (ms.m1s - a.r1s) % ms.m1s,
                  (ms.m2 - a.r2) % ms.m2, (ms.m2s - a.r2s) % ms.m2s};
}

inline RnsInt rns_mul(const RnsInt& a, const RnsInt& b, const ModuliSet& ms) {
    assert(detail::canonical(a, ms) && detail::canonical(b, ms));
    return RnsInt{(a.r1 * b.r1) % ms.m1, (a.r1s * b.r1s) % ms.m1s,
                  (a.r2 * b.r2) % ms.m2, (a.r2s * b.r2s) % ms.m2s};
}

/**
 * @brief Parity (LSB) of the represented value, without a full decode.
 *
 * Lifts each conjugate pair to its product modulus:
 *   X1 = x1* + (2^n+1) * (2^(n-1)(x1 - x1*) mod 2^n-1)
 *   X2 = x2* + (2^(n+1)+1) * (2^n(x2 - x2*) mod 2^(n+1)-1)
 * and combines: parity = LSB(X2) xor LSB((X1 - X2) mod 2^(2n)-1).
 * The combination step works because X = X2 + (2^(2n+2)-1)*s with
 * 3s = (X1 - X2) mod (2^(2n)-1) and 3s below the modulus, so the fold
 * never wraps and LSB(3s) = LSB(s).
 *
 * Only meaningful for consistent tuples; an inconsistent tuple has no
 * represented value and the returned bit is unspecified.
 */
inline unsigned rns_parity(const RnsInt& x, const ModuliSet& ms) {
    assert(detail::canonical(x, ms));
    const unsigned n = ms.n;
    const std::uint64_t a = ms.m1 * ms.m1s;  // 2^(2n)-1

    const std::uint64_t t1 =
        ((std::uint64_t{1} << (n - 1)) *
         detail::mod_floor(static_cast<std::int64_t>(x.r1) - static_cast<std::int64_t>(x.r1s), ms.m1)) %
        ms.m1;
    const std::uint64_t x1 = x.r1s + ms.m1s * t1;

    const std::uint64_t t2 =
        ((std::uint64_t{1} << n) *
         detail::mod_floor(static_cast<std::int64_t>(x.r2) - static_cast<std::int64_t>(x.r2s), ms.m2)) %
        ms.m2;
    const std::uint64_t x2 = x.r2s + ms.m2s * t2;

    const std::uint64_t d =
        detail::mod_floor(static_cast<std::int64_t>(x1) - static_cast<std::int64_t>(x2), a);
    return static_cast<unsigned>((x2 ^ d) & 1);
}

/**
 * @brief Unsigned comparison decode(a) >= decode(b) by parity checking.
 *
 * C = (a - b) mod M equals A-B when A >= B and M+A-B otherwise; M is odd,
 * so the two cases have opposite parity and LSB(C) == LSB(A) xor LSB(B)
 * exactly in the first case. Equal operands give C = 0, which matches, so
 * compare_ge(x, x) is true.
 */
inline bool rns_compare_ge(const RnsInt& a, const RnsInt& b, const ModuliSet& ms) {
    const unsigned pc = rns_parity(rns_sub(a, b, ms), ms);
    return pc == (rns_parity(a, ms) ^ rns_parity(b, ms));
}

/**
 * @brief Half-comparator ReLU: x unchanged when its signed reading is
 *        non-negative, encode(0) otherwise.
 *
 * The comparison threshold is fixed at (M+1)/2, so its parity and its
 * additive inverse are ModuliSet constants; each call costs one modular
 * add and two parity extractions instead of a full comparator.
 */
inline RnsInt rns_relu(const RnsInt& x, const ModuliSet& ms) {
    const RnsInt c = rns_add(x, ms.threshold_inverse, ms);  // x - (M+1)/2 mod M
    const bool is_negative = rns_parity(c, ms) == (rns_parity(x, ms) ^ ms.threshold_parity);
    return is_negative ? RnsInt{} : x;
}

/**
 * @brief Index of the maximum signed value; ties break to the lowest index.
 *
 * Values are shifted by +pos_max (the precomputed threshold inverse) so the
 * signed order becomes the plain unsigned order, then scanned with the full
 * comparator.
 */
inline std::size_t rns_argmax(std::span<const RnsInt> xs, const ModuliSet& ms) {
    if (xs.empty())
        throw std::invalid_argument("rns_argmax: empty sequence");
    RnsInt best = rns_add(xs[0], ms.threshold_inverse, ms);
    std::size_t best_index = 0;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const RnsInt shifted = rns_add(xs[i], ms.threshold_inverse, ms);
        if (!rns_compare_ge(best, shifted, ms)) {
            best = shifted;
            best_index = i;
        }
    }
    return best_index;
}

}  // namespace rnsnet
