// Unit tests for the word-level RNS core, checked against plain integer
// oracles. The n=2 set (moduli 3, 5, 7, 9; M = 315) is small enough to
// sweep exhaustively.

#include <catch2/catch.hpp>

#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "rnsnet/rns_core.hpp"

using namespace rnsnet;

namespace {

// Independent oracle: scan [0, M) for the value matching every residue.
std::int64_t brute_force_decode(const RnsInt& r, const ModuliSet& ms) {
    std::int64_t found = -1;
    for (std::uint64_t x = 0; x < ms.M; ++x) {
        if (x % ms.m1 == r.r1 && x % ms.m1s == r.r1s && x % ms.m2 == r.r2 && x % ms.m2s == r.r2s) {
            REQUIRE(found == -1);  // uniqueness
            found = static_cast<std::int64_t>(x);
        }
    }
    return found;
}

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

}  // namespace

TEST_CASE("moduli set constants for the default n=7") {
    const ModuliSet ms = make_moduli_set(7);
    CHECK(ms.m1 == 127);
    CHECK(ms.m1s == 129);
    CHECK(ms.m2 == 255);
    CHECK(ms.m2s == 257);
    CHECK(ms.M == 357886635);
    CHECK(ms.pos_max == 178943317);
    CHECK(ms.residue_bits[0] + ms.residue_bits[1] + ms.residue_bits[2] + ms.residue_bits[3] == 32);
    CHECK(ms.value_bits == 29);
}

TEST_CASE("moduli set invariants across n") {
    for (unsigned n = 2; n <= 15; ++n) {
        const ModuliSet ms = make_moduli_set(n);
        CHECK(ms.m1 * ms.m1s == (std::uint64_t{1} << (2 * n)) - 1);
        CHECK(ms.m2 * ms.m2s == (std::uint64_t{1} << (2 * n + 2)) - 1);
        CHECK(ms.M % 2 == 1);
        CHECK(ms.M == ms.m1 * ms.m1s / 3 * (ms.m2 * ms.m2s));
        CHECK(ms.pos_max == (ms.M - 1) / 2);
        // exactly one cross pair shares the factor 3
        CHECK(std::gcd(ms.m1, ms.m1s) == 1);
        CHECK(std::gcd(ms.m2, ms.m2s) == 1);
        const auto g13 = std::gcd(ms.m1s, ms.m2);
        const auto g02 = std::gcd(ms.m1, ms.m2s);
        CHECK(((g13 == 3 && g02 == 1) || (g13 == 1 && g02 >= 3)));
    }
}

TEST_CASE("moduli set for n=2 and parameter errors") {
    const ModuliSet ms = make_moduli_set(2);
    CHECK(ms.m1 == 3);
    CHECK(ms.m1s == 5);
    CHECK(ms.m2 == 7);
    CHECK(ms.m2s == 9);
    CHECK(ms.M == 315);
    CHECK_THROWS_AS(make_moduli_set(1), std::invalid_argument);
    CHECK_THROWS_AS(make_moduli_set(0), std::invalid_argument);
    CHECK_THROWS_AS(make_moduli_set(16), std::invalid_argument);
}

TEST_CASE("encode basics") {
    const ModuliSet ms = make_moduli_set(7);
    CHECK(encode(0, ms) == RnsInt{0, 0, 0, 0});
    CHECK(encode(100, ms) == RnsInt{100, 100, 100, 100});
    CHECK(encode(300, ms) == RnsInt{46, 42, 45, 43});
    CHECK_THROWS_AS(encode(ms.M, ms), std::out_of_range);
}

TEST_CASE("decode recovers the unique preimage") {
    const ModuliSet ms7 = make_moduli_set(7);
    CHECK(decode(RnsInt{0, 0, 0, 0}, ms7) == 0);
    CHECK(decode(encode(ms7.M - 1, ms7), ms7) == ms7.M - 1);

    const ModuliSet ms2 = make_moduli_set(2);
    const RnsInt tuple{1, 2, 3, 4};
    CHECK(brute_force_decode(tuple, ms2) == 157);
    CHECK(decode(tuple, ms2) == 157);

    for (std::uint64_t x = 0; x < ms2.M; ++x)  // exhaustive round trip
        REQUIRE(decode(encode(x, ms2), ms2) == x);
}

TEST_CASE("decode rejects non-canonical and inconsistent tuples") {
    const ModuliSet ms = make_moduli_set(7);
    CHECK_THROWS_AS(decode(RnsInt{127, 0, 0, 0}, ms), std::invalid_argument);
    // 3 divides both m1s=129 and m2=255; r1s=1, r2=0 disagree mod 3
    CHECK_THROWS_AS(decode(RnsInt{0, 1, 0, 0}, ms), std::domain_error);

    // for even n the shared factor sits on m1 and m2s instead
    const ModuliSet ms2 = make_moduli_set(2);
    CHECK_THROWS_AS(decode(RnsInt{1, 0, 0, 0}, ms2), std::domain_error);
}

TEST_CASE("decode round trip at small odd and even n") {
    for (unsigned n : {3u, 4u}) {
        const ModuliSet ms = make_moduli_set(n);
        for (std::uint64_t x = 0; x < ms.M; x += 7)
            REQUIRE(decode(encode(x, ms), ms) == x);
        REQUIRE(decode(encode(ms.M - 1, ms), ms) == ms.M - 1);
    }
}

TEST_CASE("signed wrap-around mapping") {
    const ModuliSet ms = make_moduli_set(7);
    CHECK(encode_signed(-1, ms) == encode(ms.M - 1, ms));
    CHECK(decode_signed(encode(ms.M - 5, ms), ms) == -5);
    CHECK(decode_signed(encode_signed(0, ms), ms) == 0);
    CHECK_THROWS_AS(encode_signed(static_cast<SignedValue>(ms.pos_max) + 1, ms), std::out_of_range);
    CHECK_THROWS_AS(encode_signed(-static_cast<SignedValue>(ms.pos_max) - 1, ms), std::out_of_range);

    const ModuliSet ms2 = make_moduli_set(2);
    CHECK(decode_signed(encode(157, ms2), ms2) == 157);
    CHECK(decode_signed(encode(158, ms2), ms2) == -157);
}

TEST_CASE("ring operations match the integer oracle exhaustively at n=2") {
    const ModuliSet ms = make_moduli_set(2);
    std::vector<RnsInt> enc(ms.M);
    for (std::uint64_t x = 0; x < ms.M; ++x) enc[x] = encode(x, ms);
    for (std::uint64_t a = 0; a < ms.M; ++a)
        for (std::uint64_t b = 0; b < ms.M; ++b) {
            REQUIRE(decode(rns_add(enc[a], enc[b], ms), ms) == (a + b) % ms.M);
            REQUIRE(decode(rns_sub(enc[a], enc[b], ms), ms) == (a + ms.M - b) % ms.M);
            REQUIRE(decode(rns_mul(enc[a], enc[b], ms), ms) == (a * b) % ms.M);
        }
    for (std::uint64_t a = 0; a < ms.M; ++a)
        REQUIRE(decode(rns_neg(enc[a], ms), ms) == (ms.M - a) % ms.M);
}

TEST_CASE("ring operation examples") {
    const ModuliSet ms2 = make_moduli_set(2);
    CHECK(rns_mul(encode(20, ms2), encode(30, ms2), ms2) == encode(285, ms2));
    CHECK(rns_add(encode(42, ms2), encode(0, ms2), ms2) == encode(42, ms2));

    const ModuliSet ms7 = make_moduli_set(7);
    const std::uint64_t expect = mul_mod(50000, 40000, ms7.M);
    CHECK(expect == 210566825);
    CHECK(rns_mul(encode(50000, ms7), encode(40000, ms7), ms7) == encode(expect, ms7));
}

TEST_CASE("ring homomorphism on random n=7 pairs") {
    const ModuliSet ms = make_moduli_set(7);
    std::mt19937_64 rng(7);
    for (int i = 0; i < 20000; ++i) {
        const std::uint64_t a = rng() % ms.M;
        const std::uint64_t b = rng() % ms.M;
        const RnsInt ra = encode(a, ms), rb = encode(b, ms);
        REQUIRE(decode(rns_add(ra, rb, ms), ms) == (a + b) % ms.M);
        REQUIRE(decode(rns_sub(ra, rb, ms), ms) == (a + ms.M - b) % ms.M);
        REQUIRE(decode(rns_mul(ra, rb, ms), ms) == mul_mod(a, b, ms.M));
        REQUIRE(decode(encode(a, ms), ms) == a);
    }
}

TEST_CASE("parity equals the value's LSB") {
    const ModuliSet ms2 = make_moduli_set(2);
    CHECK(rns_parity(encode(0, ms2), ms2) == 0);
    for (std::uint64_t x = 0; x < ms2.M; ++x)
        REQUIRE(rns_parity(encode(x, ms2), ms2) == (x & 1));

    const ModuliSet ms7 = make_moduli_set(7);
    CHECK(rns_parity(encode(ms7.M - 1, ms7), ms7) == 0);  // M odd, so M-1 even
    std::mt19937_64 rng(11);
    for (int i = 0; i < 100000; ++i) {
        const std::uint64_t x = rng() % ms7.M;
        REQUIRE(rns_parity(encode(x, ms7), ms7) == (x & 1));
    }
}

TEST_CASE("comparison via parity, exhaustively at n=2") {
    const ModuliSet ms = make_moduli_set(2);
    std::vector<RnsInt> enc(ms.M);
    for (std::uint64_t x = 0; x < ms.M; ++x) enc[x] = encode(x, ms);
    for (std::uint64_t a = 0; a < ms.M; ++a)
        for (std::uint64_t b = 0; b < ms.M; ++b)
            REQUIRE(rns_compare_ge(enc[a], enc[b], ms) == (a >= b));
}

TEST_CASE("comparison examples at n=7") {
    const ModuliSet ms = make_moduli_set(7);
    CHECK(rns_compare_ge(encode(7, ms), encode(3, ms), ms));
    CHECK_FALSE(rns_compare_ge(encode(3, ms), encode(7, ms), ms));
    CHECK(rns_compare_ge(encode(12345, ms), encode(12345, ms), ms));
    std::mt19937_64 rng(13);
    for (int i = 0; i < 50000; ++i) {
        const std::uint64_t a = rng() % ms.M;
        const std::uint64_t b = rng() % ms.M;
        REQUIRE(rns_compare_ge(encode(a, ms), encode(b, ms), ms) == (a >= b));
    }
}

TEST_CASE("half-comparator ReLU over the whole signed range at n=2") {
    const ModuliSet ms = make_moduli_set(2);
    CHECK(rns_relu(encode(0, ms), ms) == encode(0, ms));
    CHECK(rns_relu(encode_signed(-3, ms), ms) == encode(0, ms));
    const std::int64_t bound = static_cast<std::int64_t>(ms.pos_max);
    for (std::int64_t v = -bound; v <= bound; ++v)
        REQUIRE(decode_signed(rns_relu(encode_signed(v, ms), ms), ms) == std::max<std::int64_t>(v, 0));
}

TEST_CASE("ReLU on random signed values at n=7") {
    const ModuliSet ms = make_moduli_set(7);
    std::mt19937_64 rng(17);
    const std::int64_t bound = static_cast<std::int64_t>(ms.pos_max);
    for (int i = 0; i < 50000; ++i) {
        const std::int64_t v = static_cast<std::int64_t>(rng() % ms.M) - bound;
        REQUIRE(decode_signed(rns_relu(encode_signed(v, ms), ms), ms) == std::max<std::int64_t>(v, 0));
    }
}

TEST_CASE("argmax picks the maximum signed value, lowest index on ties") {
    const ModuliSet ms = make_moduli_set(2);
    CHECK(rns_argmax(std::vector<RnsInt>{encode(5, ms)}, ms) == 0);
    CHECK(rns_argmax(std::vector<RnsInt>{encode(3, ms), encode(3, ms)}, ms) == 0);
    CHECK_THROWS_AS(rns_argmax(std::vector<RnsInt>{}, ms), std::invalid_argument);

    std::mt19937_64 rng(19);
    const std::int64_t bound = static_cast<std::int64_t>(ms.pos_max);
    for (int trial = 0; trial < 10000; ++trial) {
        std::vector<std::int64_t> vals(8);
        std::vector<RnsInt> enc(8);
        for (int i = 0; i < 8; ++i) {
            vals[i] = static_cast<std::int64_t>(rng() % ms.M) - bound;
            enc[i] = encode_signed(vals[i], ms);
        }
        std::size_t expect = 0;
        for (std::size_t i = 1; i < 8; ++i)
            if (vals[i] > vals[expect]) expect = i;
        REQUIRE(rns_argmax(enc, ms) == expect);
    }
}

TEST_CASE("core operations at the 64-bit boundary n=15") {
    const ModuliSet ms = make_moduli_set(15);
    CHECK(ms.value_bits == 61);
    std::mt19937_64 rng(29);
    for (int i = 0; i < 5000; ++i) {
        const std::uint64_t a = rng() % ms.M;
        const std::uint64_t b = rng() % ms.M;
        const RnsInt ra = encode(a, ms), rb = encode(b, ms);
        REQUIRE(decode(ra, ms) == a);
        REQUIRE(decode(rns_add(ra, rb, ms), ms) == (a + b) % ms.M);
        REQUIRE(decode(rns_mul(ra, rb, ms), ms) == mul_mod(a, b, ms.M));
        REQUIRE(rns_parity(ra, ms) == (a & 1));
        REQUIRE(rns_compare_ge(ra, rb, ms) == (a >= b));
    }
    const std::int64_t bound = static_cast<std::int64_t>(ms.pos_max);
    for (int i = 0; i < 2000; ++i) {
        const std::int64_t v = static_cast<std::int64_t>(rng() % ms.M) - bound;
        REQUIRE(decode_signed(encode_signed(v, ms), ms) == v);
        REQUIRE(decode_signed(rns_relu(encode_signed(v, ms), ms), ms) == std::max<std::int64_t>(v, 0));
    }
}

TEST_CASE("argmax is invariant under a common shift") {
    const ModuliSet ms = make_moduli_set(7);
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<std::int64_t> vals(6);
        for (auto& v : vals) v = static_cast<std::int64_t>(rng() % 20001) - 10000;
        const std::int64_t shift = static_cast<std::int64_t>(rng() % 10001) - 5000;
        std::vector<RnsInt> plain(6), shifted(6);
        for (int i = 0; i < 6; ++i) {
            plain[i] = encode_signed(vals[i], ms);
            shifted[i] = encode_signed(vals[i] + shift, ms);
        }
        REQUIRE(rns_argmax(plain, ms) == rns_argmax(shifted, ms));
    }
}
