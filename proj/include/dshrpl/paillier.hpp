#pragma once

// Additively homomorphic encryption for the data plane, textbook Paillier:
// keygen / encrypt / evaluate / decrypt. Evaluation multiplies ciphertexts
// modulo n^2, which adds the underlying plaintexts modulo n. The root holds
// the only key pair; every other node sees nothing but the public key.

#include <cstdint>
#include <vector>

#include "dshrpl/bignum.hpp"
#include "dshrpl/rng.hpp"

namespace dshrpl {

struct PublicKey {
    BigUint n;          // p*q
    BigUint n_squared;  // cached modulus for ciphertext arithmetic
    BigUint g;          // generator, n+1
    std::uint32_t key_id = 0;
};

struct SecretKey {
    BigUint lambda;  // lcm(p-1, q-1)
    BigUint mu;      // (L(g^lambda mod n^2))^-1 mod n
    std::uint32_t key_id = 0;
};

struct Ciphertext {
    BigUint value;  // in [1, n^2-1], coprime to n
    std::uint32_t key_id = 0;
};

struct KeyPair {
    PublicKey pub;
    SecretKey sec;
};

// Generates a key pair from two distinct seeded primes of prime_bits each.
// prime_bits >= 16; anything smaller throws Error(Domain).
KeyPair paillier_keygen(std::size_t prime_bits, Rng& rng);

// Forces a specific (p, q) pair; used by small-prime fixtures.
KeyPair paillier_keygen_from_primes(const BigUint& p, const BigUint& q, std::uint32_t key_id = 0);

// Randomized encryption of m in [0, n). Throws Error(Domain) for m >= n.
Ciphertext paillier_encrypt(const PublicKey& pk, const BigUint& m, Rng& rng);

// Ciphertext-domain addition: decrypts to (m1 + m2) mod n. Throws
// Error(Key) when the ciphertexts come from different keys.
Ciphertext paillier_eval_add(const PublicKey& pk, const Ciphertext& c1, const Ciphertext& c2);

// Recovers the plaintext. Throws Error(Integrity) for malformed ciphertexts
// (zero, out of range, or sharing a factor with n).
BigUint paillier_decrypt(const PublicKey& pk, const SecretKey& sk, const Ciphertext& c);

// Length-free serialization used inside DATA packets: big-endian magnitude.
std::vector<std::uint8_t> ciphertext_to_bytes(const Ciphertext& c);
Ciphertext ciphertext_from_bytes(const std::vector<std::uint8_t>& bytes, std::uint32_t key_id);

} // namespace dshrpl
