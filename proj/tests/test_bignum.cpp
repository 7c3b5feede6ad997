#include <doctest.h>

#include "dshrpl/bignum.hpp"
#include "dshrpl/errors.hpp"
#include "dshrpl/rng.hpp"

using namespace dshrpl;

TEST_CASE("small-value arithmetic matches 64-bit integers") {
    Rng rng(101);
    for (int i = 0; i < 5000; ++i) {
        const std::uint64_t a = rng.next_u64() >> static_cast<int>(rng.below(40));
        const std::uint64_t b = rng.next_u64() >> static_cast<int>(rng.below(40));

        CHECK((BigUint{a} + BigUint{b}).to_u64() == a + b);
        if (a >= b) CHECK((BigUint{a} - BigUint{b}).to_u64() == a - b);
        if (b != 0) {
            CHECK((BigUint{a} / BigUint{b}).to_u64() == a / b);
            CHECK((BigUint{a} % BigUint{b}).to_u64() == a % b);
        }
        const std::uint32_t a32 = static_cast<std::uint32_t>(a);
        const std::uint32_t b32 = static_cast<std::uint32_t>(b);
        CHECK((BigUint{a32} * BigUint{b32}).to_u64() ==
              static_cast<std::uint64_t>(a32) * b32);
    }
}

TEST_CASE("division identity holds for wide random operands") {
    Rng rng(103);
    for (int i = 0; i < 2000; ++i) {
        BigUint a = BigUint::random_bits(rng, 1 + rng.below(512));
        BigUint b = BigUint::random_bits(rng, 1 + rng.below(300));
        auto dm = BigUint::divmod(a, b);
        CHECK(dm.remainder < b);
        CHECK(dm.quotient * b + dm.remainder == a);
    }
    CHECK_THROWS_AS(BigUint::divmod(BigUint{5}, BigUint{}), Error);
}

TEST_CASE("shifts agree with multiplication by powers of two") {
    Rng rng(104);
    for (int i = 0; i < 500; ++i) {
        BigUint a = BigUint::random_bits(rng, 1 + rng.below(200));
        const std::size_t s = rng.below(70);
        BigUint pow = BigUint{1} << s;
        CHECK((a << s) == a * pow);
        CHECK(((a << s) >> s) == a);
    }
}

TEST_CASE("byte and decimal serialization roundtrip") {
    Rng rng(105);
    for (int i = 0; i < 300; ++i) {
        BigUint a = BigUint::random_bits(rng, 1 + rng.below(256));
        CHECK(BigUint::from_bytes(a.to_bytes()) == a);
        CHECK(BigUint::from_decimal(a.to_decimal()) == a);
    }
    CHECK(BigUint{}.to_bytes().empty());
    CHECK(BigUint{}.to_decimal() == "0");
    CHECK(BigUint::from_decimal("340282366920938463463374607431768211456") ==
          (BigUint{1} << 128));
}

TEST_CASE("modpow matches naive repeated multiplication") {
    Rng rng(106);
    for (int i = 0; i < 200; ++i) {
        const std::uint64_t base = rng.below(1 << 20);
        const std::uint64_t exp = rng.below(64);
        const std::uint64_t mod = 2 + rng.below(1 << 20);

        BigUint expect{1};
        const BigUint m{mod};
        for (std::uint64_t k = 0; k < exp; ++k) expect = (expect * BigUint{base}) % m;
        CHECK(BigUint::modpow(BigUint{base}, BigUint{exp}, m) == expect);
    }
}

TEST_CASE("modular inverse multiplies back to one") {
    Rng rng(107);
    int tested = 0;
    while (tested < 300) {
        BigUint m = BigUint::random_bits(rng, 16 + rng.below(120));
        BigUint a = BigUint::random_below(rng, m);
        if (a.is_zero() || BigUint::gcd(a, m) != BigUint{1}) continue;
        BigUint inv = BigUint::modinv(a, m);
        CHECK((a * inv) % m == BigUint{1});
        ++tested;
    }
    CHECK_THROWS_AS(BigUint::modinv(BigUint{6}, BigUint{9}), Error);
}

TEST_CASE("primality testing on known values") {
    Rng rng(108);
    CHECK(BigUint::is_probable_prime(BigUint{2}, rng));
    CHECK(BigUint::is_probable_prime(BigUint{65537}, rng));
    CHECK(BigUint::is_probable_prime(BigUint{(1ull << 61) - 1}, rng));  // Mersenne
    CHECK(!BigUint::is_probable_prime(BigUint{1}, rng));
    CHECK(!BigUint::is_probable_prime(BigUint{561}, rng));   // Carmichael
    CHECK(!BigUint::is_probable_prime(BigUint{62745}, rng)); // 3*5*47*89, Carmichael
    CHECK(!BigUint::is_probable_prime((BigUint{1} << 64), rng));
}

TEST_CASE("random primes have the requested width and divide nothing smooth") {
    Rng rng(109);
    for (std::size_t bits : {16u, 24u, 32u, 48u, 64u}) {
        BigUint p = BigUint::random_prime(rng, bits);
        CHECK(p.bit_length() == bits);
        Rng check(1);
        CHECK(BigUint::is_probable_prime(p, check));
    }
}

TEST_CASE("gcd and lcm basics") {
    CHECK(BigUint::gcd(BigUint{12}, BigUint{18}) == BigUint{6});
    CHECK(BigUint::gcd(BigUint{17}, BigUint{5}) == BigUint{1});
    CHECK(BigUint::lcm(BigUint{10}, BigUint{12}) == BigUint{60});
    CHECK(BigUint::lcm(BigUint{10}, BigUint{12}) == BigUint{60});
    CHECK(BigUint::gcd(BigUint{}, BigUint{7}) == BigUint{7});
}
