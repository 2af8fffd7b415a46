/**
 * @file prefix_adder.hpp
 * @brief Parallel-prefix (Kogge-Stone) modulo adders for 2^w-1 and 2^w+1.
 *
 * Both adders model the datapath explicitly: generate/propagate
 * preprocessing, ceil(log2 w) levels of dot operations, then the
 * end-around carry correction. The mod 2^w-1 adder feeds the output carry
 * back directly; the mod 2^w+1 adder runs a diminished-1 core with the
 * complemented carry and converts at the boundaries.
 *
 * @license Apache-2.0
 */

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rnsnet/bitvec.hpp"

namespace rnsnet::hw {

/// Carry generate/propagate pair, combined by the prefix dot operator.
struct GpPair {
    bool g{};
    bool p{};

    friend bool operator==(const GpPair&, const GpPair&) = default;
};

/// Signals of one prefix-tree evaluation: levels[0] holds the preprocessed
/// per-bit pairs, each following entry is the output of one dot stage.
struct PrefixTrace {
    unsigned width{};
    std::vector<std::vector<GpPair>> levels;

    std::size_t dot_levels() const { return levels.empty() ? 0 : levels.size() - 1; }
};

namespace detail {

inline GpPair dot(const GpPair& hi, const GpPair& lo) {
    return GpPair{hi.g || (hi.p && lo.g), hi.p && lo.p};
}

}  // namespace detail

/// Builds the Kogge-Stone carry tree for a+b. After the last level, entry i
/// holds the group generate/propagate of bits [i..0].
inline PrefixTrace prefix_tree(const BitVec& a, const BitVec& b) {
    rnsnet::detail::require_same_width(a, b, "prefix_tree");
    const unsigned w = a.width;

    PrefixTrace trace;
    trace.width = w;
    std::vector<GpPair> level(w);
    for (unsigned i = 0; i < w; ++i)
        level[i] = GpPair{a.bit(i) && b.bit(i), a.bit(i) != b.bit(i)};
    trace.levels.push_back(level);

    for (unsigned dist = 1; dist < w; dist <<= 1) {
        std::vector<GpPair> next(w);
        for (unsigned i = 0; i < w; ++i)
            next[i] = i >= dist ? detail::dot(level[i], level[i - dist]) : level[i];
        trace.levels.push_back(next);
        level = next;
    }
    return trace;
}

/// One line per signal: `level.index g=<bit> p=<bit>`.
inline std::string dump_trace(const PrefixTrace& trace) {
    std::string out;
    for (std::size_t lvl = 0; lvl < trace.levels.size(); ++lvl)
        for (std::size_t i = 0; i < trace.levels[lvl].size(); ++i) {
            const GpPair& gp = trace.levels[lvl][i];
            out += std::to_string(lvl) + "." + std::to_string(i) + " g=" + (gp.g ? "1" : "0") +
                   " p=" + (gp.p ? "1" : "0") + "\n";
        }
    return out;
}

namespace detail {

/// Sum bits from a finished prefix tree and a carry-in.
inline BitVec prefix_sum(const PrefixTrace& trace, bool carry_in) {
    const unsigned w = trace.width;
    const std::vector<GpPair>& pre = trace.levels.front();
    const std::vector<GpPair>& group = trace.levels.back();
    std::uint64_t sum = 0;
    for (unsigned i = 0; i < w; ++i) {
        const bool carry = i == 0 ? carry_in : (group[i - 1].g || (group[i - 1].p && carry_in));
        if (pre[i].p != carry) sum |= std::uint64_t{1} << i;
    }
    return BitVec{w, sum};
}

/**
 * End-around-carry core for mod 2^w-1: (a+b) mod (2^w-1) = (a+b+c_out) mod 2^w.
 * Tolerates the all-ones alias on either input and canonicalizes the output
 * (the all-ones word, an alias of zero, is never emitted).
 */
inline BitVec eac_add_raw(const BitVec& a, const BitVec& b, PrefixTrace* trace_out = nullptr) {
    const PrefixTrace trace = prefix_tree(a, b);
    const bool carry_out = trace.levels.back()[trace.width - 1].g;
    BitVec sum = prefix_sum(trace, carry_out);
    if (sum.all_ones()) sum.bits = 0;
    if (trace_out) *trace_out = trace;
    return sum;
}

}  // namespace detail

/**
 * @brief Modulo 2^w-1 addition through the prefix tree with end-around carry.
 *
 * Operands must be canonical residues (strictly below 2^w-1); the result is
 * canonical as well.
 */
inline BitVec ppa_add_m1(const BitVec& a, const BitVec& b, PrefixTrace* trace_out = nullptr) {
    rnsnet::detail::require_same_width(a, b, "ppa_add_m1");
    if (a.all_ones() || b.all_ones())
        throw std::invalid_argument("ppa_add_m1: operand not a canonical residue mod 2^w-1");
    return detail::eac_add_raw(a, b, trace_out);
}

/**
 * @brief Modulo 2^w+1 addition, normal representation at the interface.
 *
 * Operands are (w+1)-bit vectors with values up to 2^w. Zero cannot be
 * carried through the diminished-1 core, so it bypasses; otherwise both
 * operands convert to diminished form, pass the complemented-end-around
 * prefix adder, and convert back. A sum that lands exactly on 2^w+1 shows
 * up as a full group propagate and is forced to zero.
 */
inline BitVec add_p1(const BitVec& a, const BitVec& b, PrefixTrace* trace_out = nullptr) {
    rnsnet::detail::require_same_width(a, b, "add_p1");
    if (a.width < 2) throw std::invalid_argument("add_p1: operands need w+1 >= 2 bits");
    const unsigned w = a.width - 1;
    const std::uint64_t top = std::uint64_t{1} << w;
    if (a.value() > top || b.value() > top)
        throw std::invalid_argument("add_p1: operand not a canonical residue mod 2^w+1");

    if (trace_out) *trace_out = PrefixTrace{};
    if (a.value() == 0) return b;
    if (b.value() == 0) return a;

    const BitVec da = BitVec::of(a.value() - 1, w);
    const BitVec db = BitVec::of(b.value() - 1, w);
    const PrefixTrace trace = prefix_tree(da, db);
    if (trace_out) *trace_out = trace;

    const GpPair& group = trace.levels.back()[w - 1];
    if (group.p) return BitVec::zeros(w + 1);  // a + b == 2^w + 1 exactly

    const BitVec dsum = detail::prefix_sum(trace, !group.g);
    return BitVec::of(dsum.value() + 1, w + 1);
}

}  // namespace rnsnet::hw
