#include <doctest.h>

#include "dshrpl/errors.hpp"
#include "dshrpl/paillier.hpp"

using namespace dshrpl;

namespace {

KeyPair fixture_key() { return paillier_keygen_from_primes(BigUint{11}, BigUint{13}, 7); }

} // namespace

TEST_CASE("forced small primes produce the expected modulus") {
    KeyPair kp = fixture_key();
    CHECK(kp.pub.n == BigUint{143});
    CHECK(kp.pub.n_squared == BigUint{143 * 143});
    CHECK(kp.pub.g == BigUint{144});
    CHECK(kp.sec.lambda == BigUint{60});  // lcm(10, 12)
    CHECK_THROWS_AS(paillier_keygen_from_primes(BigUint{11}, BigUint{11}), Error);
    CHECK_THROWS_AS(paillier_keygen_from_primes(BigUint{12}, BigUint{13}), Error);
}

TEST_CASE("keygen is deterministic for a fixed seed") {
    Rng a(42), b(42), c(43);
    KeyPair ka = paillier_keygen(16, a);
    KeyPair kb = paillier_keygen(16, b);
    KeyPair kc = paillier_keygen(16, c);
    CHECK(ka.pub.n == kb.pub.n);
    CHECK(ka.sec.lambda == kb.sec.lambda);
    CHECK(ka.pub.n != kc.pub.n);

    Rng r(1);
    CHECK_THROWS_AS(paillier_keygen(8, r), Error);
}

TEST_CASE("decrypt inverts encrypt over the whole fixture plaintext space") {
    KeyPair kp = fixture_key();
    Rng rng(7);
    for (std::uint64_t m = 0; m < 143; ++m) {
        Ciphertext c = paillier_encrypt(kp.pub, BigUint{m}, rng);
        CHECK(paillier_decrypt(kp.pub, kp.sec, c) == BigUint{m});
    }
}

TEST_CASE("encryption is randomized but decryption is stable") {
    KeyPair kp = fixture_key();
    Rng rng(9);
    Ciphertext c1 = paillier_encrypt(kp.pub, BigUint{42}, rng);
    Ciphertext c2 = paillier_encrypt(kp.pub, BigUint{42}, rng);
    CHECK(c1.value != c2.value);
    CHECK(paillier_decrypt(kp.pub, kp.sec, c1) == BigUint{42});
    CHECK(paillier_decrypt(kp.pub, kp.sec, c2) == BigUint{42});
}

TEST_CASE("domain guards") {
    KeyPair kp = fixture_key();
    Rng rng(11);
    CHECK_THROWS_AS(paillier_encrypt(kp.pub, BigUint{143}, rng), Error);

    Ciphertext zero{BigUint{}, kp.pub.key_id};
    CHECK_THROWS_AS(paillier_decrypt(kp.pub, kp.sec, zero), Error);

    Ciphertext offkey = paillier_encrypt(kp.pub, BigUint{5}, rng);
    offkey.key_id = 999;
    CHECK_THROWS_AS(paillier_decrypt(kp.pub, kp.sec, offkey), Error);
    CHECK_THROWS_AS(paillier_eval_add(kp.pub, offkey, offkey), Error);

    // A multiple of n is not coprime to n.
    Ciphertext crooked{BigUint{143 * 11}, kp.pub.key_id};
    CHECK_THROWS_AS(paillier_decrypt(kp.pub, kp.sec, crooked), Error);
}

TEST_CASE("ciphertext addition decrypts to the plaintext sum") {
    KeyPair kp = fixture_key();
    Rng rng(13);

    Ciphertext five = paillier_encrypt(kp.pub, BigUint{5}, rng);
    Ciphertext seven = paillier_encrypt(kp.pub, BigUint{7}, rng);
    CHECK(paillier_decrypt(kp.pub, kp.sec, paillier_eval_add(kp.pub, five, seven)) ==
          BigUint{12});

    Ciphertext m = paillier_encrypt(kp.pub, BigUint{99}, rng);
    Ciphertext zero = paillier_encrypt(kp.pub, BigUint{}, rng);
    CHECK(paillier_decrypt(kp.pub, kp.sec, paillier_eval_add(kp.pub, m, zero)) == BigUint{99});

    Ciphertext top = paillier_encrypt(kp.pub, BigUint{142}, rng);
    Ciphertext one = paillier_encrypt(kp.pub, BigUint{1}, rng);
    CHECK(paillier_decrypt(kp.pub, kp.sec, paillier_eval_add(kp.pub, top, one)).is_zero());
}

TEST_CASE("a chain of five encrypted ones sums to five") {
    KeyPair kp = fixture_key();
    Rng rng(17);
    Ciphertext acc = paillier_encrypt(kp.pub, BigUint{1}, rng);
    for (int i = 1; i < 5; ++i)
        acc = paillier_eval_add(kp.pub, acc, paillier_encrypt(kp.pub, BigUint{1}, rng));
    CHECK(paillier_decrypt(kp.pub, kp.sec, acc) == BigUint{5});
}

TEST_CASE("homomorphism holds under a generated 32-bit key") {
    Rng keyrng(21);
    KeyPair kp = paillier_keygen(32, keyrng);
    Rng rng(22);
    for (int i = 0; i < 50; ++i) {
        BigUint a = BigUint::random_below(rng, kp.pub.n);
        BigUint b = BigUint::random_below(rng, kp.pub.n);
        Ciphertext ca = paillier_encrypt(kp.pub, a, rng);
        Ciphertext cb = paillier_encrypt(kp.pub, b, rng);
        const BigUint sum = (a + b) % kp.pub.n;
        CHECK(paillier_decrypt(kp.pub, kp.sec, paillier_eval_add(kp.pub, ca, cb)) == sum);
    }
}

TEST_CASE("ciphertext bytes roundtrip") {
    KeyPair kp = fixture_key();
    Rng rng(23);
    Ciphertext c = paillier_encrypt(kp.pub, BigUint{100}, rng);
    Ciphertext back = ciphertext_from_bytes(ciphertext_to_bytes(c), kp.pub.key_id);
    CHECK(back.value == c.value);
    CHECK(paillier_decrypt(kp.pub, kp.sec, back) == BigUint{100});
}
