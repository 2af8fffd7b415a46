/**
 * @file selftest.hpp
 * @brief Cross-module invariant suites with integer oracles.
 *
 * Each suite checks one contract against plain 64-bit integer arithmetic:
 * ring homomorphism of the residue operations, round-trip conversion,
 * parity, parity-based comparison, signed ReLU, argmax, and the bit-level
 * hardware blocks against their word-level counterparts.
 *
 * Exhaustive mode enumerates the full domain and is only allowed for
 * n <= 4 (pair suites at n=4 already take minutes). Random mode draws a
 * seeded, reproducible sample; the per-residue hardware blocks have tiny
 * domains and are always swept exhaustively up to n = 9.
 *
 * @license Apache-2.0
 */

#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rnsnet/bitvec.hpp"
#include "rnsnet/hw/multiplier.hpp"
#include "rnsnet/hw/parity_circuit.hpp"
#include "rnsnet/hw/prefix_adder.hpp"
#include "rnsnet/hw/residue_gen.hpp"
#include "rnsnet/rns_core.hpp"

namespace rnsnet {

struct SuiteResult {
    std::string name;
    bool pass = true;
    std::uint64_t cases = 0;
    std::string first_failure;  // empty when pass

    void fail(const std::string& counterexample) {
        if (pass) first_failure = counterexample;
        pass = false;
    }
};

struct SelftestConfig {
    unsigned n = 7;
    bool exhaustive = false;
    std::uint64_t random_count = 100000;
    std::uint64_t seed = 1;
};

namespace selftest_detail {

// Pair generator: exhaustive over [0, M)^2 or a seeded random sample.
template <typename Check>
void for_pairs(const ModuliSet& ms, const SelftestConfig& cfg, SuiteResult& suite, Check check) {
    if (cfg.exhaustive) {
        for (std::uint64_t a = 0; a < ms.M && suite.pass; ++a)
            for (std::uint64_t b = 0; b < ms.M; ++b) {
                ++suite.cases;
                if (!check(a, b)) {
                    suite.fail("a=" + std::to_string(a) + " b=" + std::to_string(b));
                    break;
                }
            }
    } else {
        std::mt19937_64 rng(cfg.seed);
        for (std::uint64_t i = 0; i < cfg.random_count; ++i) {
            const std::uint64_t a = rng() % ms.M;
            const std::uint64_t b = rng() % ms.M;
            ++suite.cases;
            if (!check(a, b)) {
                suite.fail("a=" + std::to_string(a) + " b=" + std::to_string(b));
                break;
            }
        }
    }
}

template <typename Check>
void for_values(const ModuliSet& ms, const SelftestConfig& cfg, SuiteResult& suite, Check check) {
    if (cfg.exhaustive) {
        for (std::uint64_t x = 0; x < ms.M; ++x) {
            ++suite.cases;
            if (!check(x)) {
                suite.fail("x=" + std::to_string(x));
                break;
            }
        }
    } else {
        std::mt19937_64 rng(cfg.seed + 1);
        for (std::uint64_t i = 0; i < cfg.random_count; ++i) {
            const std::uint64_t x = rng() % ms.M;
            ++suite.cases;
            if (!check(x)) {
                suite.fail("x=" + std::to_string(x));
                break;
            }
        }
    }
}

inline SuiteResult round_trip(const ModuliSet& ms, const SelftestConfig& cfg) {
    SuiteResult suite;
    suite.name = "round-trip";
    for_values(ms, cfg, suite, [&](std::uint64_t x) { return decode(encode(x, ms), ms) == x; });
    return suite;
}

inline SuiteResult ring_suite(const ModuliSet& ms, const SelftestConfig& cfg, char op) {
    SuiteResult suite;
    suite.name = op == '+' ? "ring-add" : op == '-' ? "ring-sub" : "ring-mul";
    for_pairs(ms, cfg, suite, [&](std::uint64_t a, std::uint64_t b) {
        const RnsInt ra = encode(a, ms), rb = encode(b, ms);
        std::uint64_t expect;
        RnsInt got;
        switch (op) {
            case '+':
                expect = (a + b) % ms.M;
                got = rns_add(ra, rb, ms);
                break;
            case '-':
                expect = (a + ms.M - b) % ms.M;
                got = rns_sub(ra, rb, ms);
                break;
            default:
                expect = static_cast<std::uint64_t>(
                    (static_cast<unsigned __int128>(a) * b) % ms.M);
                got = rns_mul(ra, rb, ms);
                break;
        }
        return decode(got, ms) == expect;
    });
    return suite;
}

inline SuiteResult parity_suite(const ModuliSet& ms, const SelftestConfig& cfg) {
    SuiteResult suite;
    suite.name = "parity";
    for_values(ms, cfg, suite,
               [&](std::uint64_t x) { return rns_parity(encode(x, ms), ms) == (x & 1); });
    return suite;
}

inline SuiteResult compare_suite(const ModuliSet& ms, const SelftestConfig& cfg) {
    SuiteResult suite;
    suite.name = "compare";
    for_pairs(ms, cfg, suite, [&](std::uint64_t a, std::uint64_t b) {
        return rns_compare_ge(encode(a, ms), encode(b, ms), ms) == (a >= b);
    });
    return suite;
}

inline SuiteResult relu_suite(const ModuliSet& ms, const SelftestConfig& cfg) {
    SuiteResult suite;
    suite.name = "relu-signed";
    const std::int64_t bound = static_cast<std::int64_t>(ms.pos_max);
    auto check = [&](std::int64_t v) {
        return decode_signed(rns_relu(encode_signed(v, ms), ms), ms) == std::max<std::int64_t>(v, 0);
    };
    if (cfg.exhaustive) {
        for (std::int64_t v = -bound; v <= bound; ++v) {
            ++suite.cases;
            if (!check(v)) {
                suite.fail("v=" + std::to_string(v));
                break;
            }
        }
    } else {
        std::mt19937_64 rng(cfg.seed + 2);
        for (std::uint64_t i = 0; i < cfg.random_count; ++i) {
            const std::int64_t v =
                static_cast<std::int64_t>(rng() % (2 * ms.pos_max + 1)) - bound;
            ++suite.cases;
            if (!check(v)) {
                suite.fail("v=" + std::to_string(v));
                break;
            }
        }
    }
    return suite;
}

inline SuiteResult argmax_suite(const ModuliSet& ms, const SelftestConfig& cfg) {
    SuiteResult suite;
    suite.name = "argmax";
    std::mt19937_64 rng(cfg.seed + 3);
    const std::uint64_t trials = cfg.exhaustive ? 10000 : std::min<std::uint64_t>(cfg.random_count, 100000);
    const std::int64_t bound = static_cast<std::int64_t>(ms.pos_max);
    for (std::uint64_t t = 0; t < trials && suite.pass; ++t) {
        std::vector<std::int64_t> values(8);
        std::vector<RnsInt> encoded(8);
        for (std::size_t i = 0; i < 8; ++i) {
            values[i] = static_cast<std::int64_t>(rng() % (2 * ms.pos_max + 1)) - bound;
            encoded[i] = encode_signed(values[i], ms);
        }
        std::size_t expect = 0;
        for (std::size_t i = 1; i < 8; ++i)
            if (values[i] > values[expect]) expect = i;
        ++suite.cases;
        if (rns_argmax(encoded, ms) != expect)
            suite.fail("trial " + std::to_string(t));
    }
    return suite;
}

// Hardware blocks have per-modulus domains of at most (2^(n+1)+1)^2 pairs,
// exhaustible in well under a second up to n = 9.
inline bool hw_exhaustive(unsigned n) { return n <= 9; }

inline SuiteResult hw_adder_suite(const ModuliSet& ms, const SelftestConfig& cfg) {
    SuiteResult suite;
    suite.name = "hw-adders";
    std::mt19937_64 rng(cfg.seed + 4);
    for (unsigned w : {ms.n, ms.n + 1}) {
        const std::uint64_t m1 = (std::uint64_t{1} << w) - 1;
        const std::uint64_t p1 = (std::uint64_t{1} << w) + 1;
        auto check_m1 = [&](std::uint64_t a, std::uint64_t b) {
            ++suite.cases;
            const std::uint64_t got = hw::ppa_add_m1(BitVec::of(a, w), BitVec::of(b, w)).value();
            if (got != (a + b) % m1)
                suite.fail("add mod 2^" + std::to_string(w) + "-1: a=" + std::to_string(a) +
                           " b=" + std::to_string(b) + " got " + std::to_string(got));
        };
        auto check_p1 = [&](std::uint64_t a, std::uint64_t b) {
            ++suite.cases;
            const std::uint64_t got = hw::add_p1(BitVec::of(a, w + 1), BitVec::of(b, w + 1)).value();
            if (got != (a + b) % p1)
                suite.fail("add mod 2^" + std::to_string(w) + "+1: a=" + std::to_string(a) +
                           " b=" + std::to_string(b) + " got " + std::to_string(got));
        };
        if (hw_exhaustive(ms.n)) {
            for (std::uint64_t a = 0; a < m1 && suite.pass; ++a)
                for (std::uint64_t b = 0; b < m1 && suite.pass; ++b) check_m1(a, b);
            for (std::uint64_t a = 0; a < p1 && suite.pass; ++a)
                for (std::uint64_t b = 0; b < p1 && suite.pass; ++b) check_p1(a, b);
        } else {
            for (std::uint64_t i = 0; i < cfg.random_count && suite.pass; ++i)
                check_m1(rng() % m1, rng() % m1);
            for (std::uint64_t i = 0; i < cfg.random_count && suite.pass; ++i)
                check_p1(rng() % p1, rng() % p1);
        }
    }
    return suite;
}

inline SuiteResult hw_multiplier_suite(const ModuliSet& ms, const SelftestConfig& cfg) {
    SuiteResult suite;
    suite.name = "hw-multipliers";
    std::mt19937_64 rng(cfg.seed + 5);
    for (unsigned w : {ms.n, ms.n + 1}) {
        const std::uint64_t m1 = (std::uint64_t{1} << w) - 1;
        const std::uint64_t p1 = (std::uint64_t{1} << w) + 1;
        auto check_m1 = [&](std::uint64_t a, std::uint64_t b) {
            ++suite.cases;
            const hw::RedundantProduct rp = hw::mul_m1(BitVec::of(a, w), BitVec::of(b, w));
            const std::uint64_t expect = (a * b) % m1;
            if ((rp.carry.value() + rp.sum.value()) % m1 != expect ||
                hw::finalize_m1(rp).value() != expect)
                suite.fail("mul mod 2^" + std::to_string(w) + "-1: a=" + std::to_string(a) +
                           " b=" + std::to_string(b));
        };
        auto check_p1 = [&](std::uint64_t a, std::uint64_t b) {
            ++suite.cases;
            const hw::RedundantProduct rp = hw::mul_p1(BitVec::of(a, w + 1), BitVec::of(b, w + 1));
            const std::uint64_t expect = (a * b) % p1;
            if ((rp.carry.value() + rp.sum.value()) % p1 != expect ||
                hw::finalize_p1(rp).value() != expect)
                suite.fail("mul mod 2^" + std::to_string(w) + "+1: a=" + std::to_string(a) +
                           " b=" + std::to_string(b));
        };
        if (hw_exhaustive(ms.n)) {
            for (std::uint64_t a = 0; a < m1 && suite.pass; ++a)
                for (std::uint64_t b = 0; b < m1 && suite.pass; ++b) check_m1(a, b);
            for (std::uint64_t a = 0; a < p1 && suite.pass; ++a)
                for (std::uint64_t b = 0; b < p1 && suite.pass; ++b) check_p1(a, b);
        } else {
            for (std::uint64_t i = 0; i < cfg.random_count && suite.pass; ++i)
                check_m1(rng() % m1, rng() % m1);
            for (std::uint64_t i = 0; i < cfg.random_count && suite.pass; ++i)
                check_p1(rng() % p1, rng() % p1);
        }
    }
    return suite;
}

inline SuiteResult hw_parity_suite(const ModuliSet& ms, const SelftestConfig& cfg) {
    SuiteResult suite;
    suite.name = "hw-parity-circuit";
    for_values(ms, cfg, suite, [&](std::uint64_t x) {
        const RnsInt r = encode(x, ms);
        return hw::parity_circuit(r, ms) == rns_parity(r, ms);
    });
    return suite;
}

inline SuiteResult hw_residue_gen_suite(const ModuliSet& ms, const SelftestConfig& cfg) {
    SuiteResult suite;
    suite.name = "hw-residue-gen";
    for_values(ms, cfg, suite, [&](std::uint64_t x) {
        const BitVec v = BitVec::of(x, ms.value_bits);
        return hw::residue_gen(v, hw::Residue::m1, ms).value() == x % ms.m1 &&
               hw::residue_gen(v, hw::Residue::m1s, ms).value() == x % ms.m1s &&
               hw::residue_gen(v, hw::Residue::m2, ms).value() == x % ms.m2 &&
               hw::residue_gen(v, hw::Residue::m2s, ms).value() == x % ms.m2s;
    });
    return suite;
}

}  // namespace selftest_detail

/// Runs every suite under one configuration. Deterministic for a fixed seed.
inline std::vector<SuiteResult> run_selftests(const SelftestConfig& cfg) {
    if (cfg.exhaustive && cfg.n > 4)
        throw std::invalid_argument("selftest: exhaustive mode is only permitted for n <= 4");
    const ModuliSet ms = make_moduli_set(cfg.n);
    namespace sd = selftest_detail;
    return {
        sd::round_trip(ms, cfg),
        sd::ring_suite(ms, cfg, '+'),
        sd::ring_suite(ms, cfg, '-'),
        sd::ring_suite(ms, cfg, '*'),
        sd::parity_suite(ms, cfg),
        sd::compare_suite(ms, cfg),
        sd::relu_suite(ms, cfg),
        sd::argmax_suite(ms, cfg),
        sd::hw_adder_suite(ms, cfg),
        sd::hw_multiplier_suite(ms, cfg),
        sd::hw_parity_suite(ms, cfg),
        sd::hw_residue_gen_suite(ms, cfg),
    };
}

}  // namespace rnsnet
