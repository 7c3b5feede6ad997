#include "dshrpl/paillier.hpp"

#include "dshrpl/errors.hpp"

namespace dshrpl {

namespace {

// L(x) = (x - 1) / n, defined on x = 1 mod n.
BigUint l_function(const BigUint& x, const BigUint& n) {
    return (x - BigUint{1}) / n;
}

KeyPair assemble(const BigUint& p, const BigUint& q, std::uint32_t key_id) {
    KeyPair kp;
    kp.pub.n = p * q;
    kp.pub.n_squared = kp.pub.n * kp.pub.n;
    kp.pub.g = kp.pub.n + BigUint{1};
    kp.pub.key_id = key_id;

    kp.sec.lambda = BigUint::lcm(p - BigUint{1}, q - BigUint{1});
    const BigUint gl = BigUint::modpow(kp.pub.g, kp.sec.lambda, kp.pub.n_squared);
    kp.sec.mu = BigUint::modinv(l_function(gl, kp.pub.n), kp.pub.n);
    kp.sec.key_id = key_id;
    return kp;
}

} // namespace

KeyPair paillier_keygen(std::size_t prime_bits, Rng& rng) {
    if (prime_bits < 16) fail(ErrorKind::Domain, "prime_bits must be at least 16");

    const BigUint p = BigUint::random_prime(rng, prime_bits);
    BigUint q = BigUint::random_prime(rng, prime_bits);
    for (int attempt = 0; q == p && attempt < 64; ++attempt)
        q = BigUint::random_prime(rng, prime_bits);
    if (q == p) fail(ErrorKind::Key, "could not find two distinct primes");

    return assemble(p, q, static_cast<std::uint32_t>(rng.next_u32() | 1u));
}

KeyPair paillier_keygen_from_primes(const BigUint& p, const BigUint& q, std::uint32_t key_id) {
    if (p == q) fail(ErrorKind::Key, "primes must be distinct");
    Rng probe(0x5eed);
    if (!BigUint::is_probable_prime(p, probe) || !BigUint::is_probable_prime(q, probe))
        fail(ErrorKind::Key, "forced factors must be prime");
    return assemble(p, q, key_id);
}

Ciphertext paillier_encrypt(const PublicKey& pk, const BigUint& m, Rng& rng) {
    if (m >= pk.n) fail(ErrorKind::Domain, "plaintext outside [0, n)");

    // nonce r in [1, n) with gcd(r, n) = 1
    BigUint r;
    do {
        r = BigUint::random_below(rng, pk.n);
    } while (r.is_zero() || BigUint::gcd(r, pk.n) != BigUint{1});

    const BigUint gm = BigUint::modpow(pk.g, m, pk.n_squared);
    const BigUint rn = BigUint::modpow(r, pk.n, pk.n_squared);
    return Ciphertext{(gm * rn) % pk.n_squared, pk.key_id};
}

Ciphertext paillier_eval_add(const PublicKey& pk, const Ciphertext& c1, const Ciphertext& c2) {
    if (c1.key_id != pk.key_id || c2.key_id != pk.key_id)
        fail(ErrorKind::Key, "ciphertext key mismatch");
    return Ciphertext{(c1.value * c2.value) % pk.n_squared, pk.key_id};
}

BigUint paillier_decrypt(const PublicKey& pk, const SecretKey& sk, const Ciphertext& c) {
    if (c.key_id != sk.key_id) fail(ErrorKind::Key, "ciphertext key mismatch");
    if (c.value.is_zero() || c.value >= pk.n_squared)
        fail(ErrorKind::Integrity, "ciphertext outside [1, n^2-1]");
    if (BigUint::gcd(c.value, pk.n) != BigUint{1})
        fail(ErrorKind::Integrity, "ciphertext shares a factor with n");

    const BigUint cl = BigUint::modpow(c.value, sk.lambda, pk.n_squared);
    return (l_function(cl, pk.n) * sk.mu) % pk.n;
}

std::vector<std::uint8_t> ciphertext_to_bytes(const Ciphertext& c) {
    return c.value.to_bytes();
}

Ciphertext ciphertext_from_bytes(const std::vector<std::uint8_t>& bytes, std::uint32_t key_id) {
    return Ciphertext{BigUint::from_bytes(bytes), key_id};
}

} // namespace dshrpl
