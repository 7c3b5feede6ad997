#pragma once

// Arbitrary-precision unsigned integers, 32-bit limbs, little-endian.
// Covers exactly what the encryption layer needs: ring arithmetic,
// modular exponentiation and inversion, and probabilistic primality.

#include <cstdint>
#include <string>
#include <vector>

#include "dshrpl/rng.hpp"

namespace dshrpl {

class BigUint {
public:
    BigUint() = default;
    BigUint(std::uint64_t v);  // NOLINT: intentionally implicit, mirrors integer literals

    static BigUint from_bytes(const std::vector<std::uint8_t>& big_endian);
    std::vector<std::uint8_t> to_bytes() const;  // big-endian, empty for zero

    static BigUint from_decimal(const std::string& s);
    std::string to_decimal() const;

    bool is_zero() const { return limbs_.empty(); }
    bool is_odd() const { return !limbs_.empty() && (limbs_[0] & 1u); }
    std::size_t bit_length() const;
    bool bit(std::size_t i) const;

    // Truncating conversion; callers must know the value fits.
    std::uint64_t to_u64() const;

    int compare(const BigUint& other) const;

    BigUint operator+(const BigUint& b) const;
    BigUint operator-(const BigUint& b) const;  // requires *this >= b
    BigUint operator*(const BigUint& b) const;
    BigUint operator/(const BigUint& b) const;
    BigUint operator%(const BigUint& b) const;
    BigUint operator<<(std::size_t bits) const;
    BigUint operator>>(std::size_t bits) const;

    bool operator==(const BigUint& b) const { return compare(b) == 0; }
    bool operator!=(const BigUint& b) const { return compare(b) != 0; }
    bool operator<(const BigUint& b) const { return compare(b) < 0; }
    bool operator<=(const BigUint& b) const { return compare(b) <= 0; }
    bool operator>(const BigUint& b) const { return compare(b) > 0; }
    bool operator>=(const BigUint& b) const { return compare(b) >= 0; }

    struct DivMod;
    static DivMod divmod(const BigUint& a, const BigUint& b);  // throws on b == 0

    static BigUint modpow(const BigUint& base, const BigUint& exp, const BigUint& mod);
    static BigUint gcd(BigUint a, BigUint b);
    static BigUint lcm(const BigUint& a, const BigUint& b);
    // Modular inverse via extended Euclid; throws Error(Key) when gcd != 1.
    static BigUint modinv(const BigUint& a, const BigUint& m);

    // Uniform value in [0, bound).
    static BigUint random_below(Rng& rng, const BigUint& bound);
    // Random value with exactly `bits` bits (top bit set).
    static BigUint random_bits(Rng& rng, std::size_t bits);

    // Miller-Rabin with the deterministic sub-2^64 witness set plus seeded
    // extra rounds for larger candidates.
    static bool is_probable_prime(const BigUint& n, Rng& rng);
    // Seeded search for a prime of exactly `bits` bits; throws Error(Key)
    // when the bounded search is exhausted.
    static BigUint random_prime(Rng& rng, std::size_t bits);

private:
    void trim();

    std::vector<std::uint32_t> limbs_;  // little-endian, no leading zeros
};

struct BigUint::DivMod {
    BigUint quotient;
    BigUint remainder;
};

} // namespace dshrpl
