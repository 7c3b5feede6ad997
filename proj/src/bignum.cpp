#include "dshrpl/bignum.hpp"

#include <algorithm>
#include <bit>

#include "dshrpl/errors.hpp"

namespace dshrpl {

namespace {
constexpr std::uint64_t kBase = 1ull << 32;
}

BigUint::BigUint(std::uint64_t v) {
    if (v != 0) limbs_.push_back(static_cast<std::uint32_t>(v & 0xFFFFFFFF));
    if (v >> 32) limbs_.push_back(static_cast<std::uint32_t>(v >> 32));
}

void BigUint::trim() {
    while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
}

BigUint BigUint::from_bytes(const std::vector<std::uint8_t>& big_endian) {
    BigUint out;
    for (std::uint8_t byte : big_endian) {
        // out = out*256 + byte
        std::uint64_t carry = byte;
        for (std::uint32_t& limb : out.limbs_) {
            const std::uint64_t v = (static_cast<std::uint64_t>(limb) << 8) | carry;
            limb = static_cast<std::uint32_t>(v & 0xFFFFFFFF);
            carry = v >> 32;
        }
        if (carry) out.limbs_.push_back(static_cast<std::uint32_t>(carry));
    }
    out.trim();
    return out;
}

std::vector<std::uint8_t> BigUint::to_bytes() const {
    std::vector<std::uint8_t> out;
    for (std::size_t i = limbs_.size(); i-- > 0;) {
        out.push_back(static_cast<std::uint8_t>(limbs_[i] >> 24));
        out.push_back(static_cast<std::uint8_t>(limbs_[i] >> 16));
        out.push_back(static_cast<std::uint8_t>(limbs_[i] >> 8));
        out.push_back(static_cast<std::uint8_t>(limbs_[i]));
    }
    while (!out.empty() && out.front() == 0) out.erase(out.begin());
    return out;
}

BigUint BigUint::from_decimal(const std::string& s) {
    BigUint out;
    const BigUint ten{10};
    for (char c : s) {
        if (c < '0' || c > '9') fail(ErrorKind::Format, "not a decimal digit");
        out = out * ten + BigUint{static_cast<std::uint64_t>(c - '0')};
    }
    return out;
}

std::string BigUint::to_decimal() const {
    if (is_zero()) return "0";
    std::string out;
    BigUint rest = *this;
    const BigUint chunk{1000000000ull};
    std::vector<std::uint32_t> groups;
    while (!rest.is_zero()) {
        DivMod dm = divmod(rest, chunk);
        groups.push_back(static_cast<std::uint32_t>(dm.remainder.to_u64()));
        rest = dm.quotient;
    }
    out = std::to_string(groups.back());
    for (std::size_t i = groups.size() - 1; i-- > 0;) {
        std::string g = std::to_string(groups[i]);
        out += std::string(9 - g.size(), '0') + g;
    }
    return out;
}

std::size_t BigUint::bit_length() const {
    if (limbs_.empty()) return 0;
    return 32 * (limbs_.size() - 1) +
           (32 - static_cast<std::size_t>(std::countl_zero(limbs_.back())));
}

bool BigUint::bit(std::size_t i) const {
    const std::size_t limb = i / 32;
    if (limb >= limbs_.size()) return false;
    return (limbs_[limb] >> (i % 32)) & 1u;
}

std::uint64_t BigUint::to_u64() const {
    std::uint64_t v = 0;
    if (!limbs_.empty()) v = limbs_[0];
    if (limbs_.size() > 1) v |= static_cast<std::uint64_t>(limbs_[1]) << 32;
    return v;
}

int BigUint::compare(const BigUint& other) const {
    if (limbs_.size() != other.limbs_.size())
        return limbs_.size() < other.limbs_.size() ? -1 : 1;
    for (std::size_t i = limbs_.size(); i-- > 0;) {
        if (limbs_[i] != other.limbs_[i]) return limbs_[i] < other.limbs_[i] ? -1 : 1;
    }
    return 0;
}

BigUint BigUint::operator+(const BigUint& b) const {
    BigUint out;
    const std::size_t n = std::max(limbs_.size(), b.limbs_.size());
    out.limbs_.resize(n);
    std::uint64_t carry = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t v = carry;
        if (i < limbs_.size()) v += limbs_[i];
        if (i < b.limbs_.size()) v += b.limbs_[i];
        out.limbs_[i] = static_cast<std::uint32_t>(v & 0xFFFFFFFF);
        carry = v >> 32;
    }
    if (carry) out.limbs_.push_back(static_cast<std::uint32_t>(carry));
    return out;
}

BigUint BigUint::operator-(const BigUint& b) const {
    if (compare(b) < 0) fail(ErrorKind::Domain, "BigUint subtraction underflow");
    BigUint out;
    out.limbs_.resize(limbs_.size());
    std::int64_t borrow = 0;
    for (std::size_t i = 0; i < limbs_.size(); ++i) {
        std::int64_t v = static_cast<std::int64_t>(limbs_[i]) - borrow;
        if (i < b.limbs_.size()) v -= static_cast<std::int64_t>(b.limbs_[i]);
        if (v < 0) {
            v += static_cast<std::int64_t>(kBase);
            borrow = 1;
        } else {
            borrow = 0;
        }
        out.limbs_[i] = static_cast<std::uint32_t>(v);
    }
    out.trim();
    return out;
}

BigUint BigUint::operator*(const BigUint& b) const {
    if (is_zero() || b.is_zero()) return {};
    BigUint out;
    out.limbs_.assign(limbs_.size() + b.limbs_.size(), 0);
    for (std::size_t i = 0; i < limbs_.size(); ++i) {
        std::uint64_t carry = 0;
        for (std::size_t j = 0; j < b.limbs_.size(); ++j) {
            std::uint64_t v = static_cast<std::uint64_t>(limbs_[i]) * b.limbs_[j] +
                              out.limbs_[i + j] + carry;
            out.limbs_[i + j] = static_cast<std::uint32_t>(v & 0xFFFFFFFF);
            carry = v >> 32;
        }
        out.limbs_[i + b.limbs_.size()] = static_cast<std::uint32_t>(carry);
    }
    out.trim();
    return out;
}

BigUint BigUint::operator<<(std::size_t bits) const {
    if (is_zero() || bits == 0) return *this;
    const std::size_t limb_shift = bits / 32;
    const std::size_t bit_shift = bits % 32;
    BigUint out;
    out.limbs_.assign(limbs_.size() + limb_shift + 1, 0);
    for (std::size_t i = 0; i < limbs_.size(); ++i) {
        const std::uint64_t v = static_cast<std::uint64_t>(limbs_[i]) << bit_shift;
        out.limbs_[i + limb_shift] |= static_cast<std::uint32_t>(v & 0xFFFFFFFF);
        out.limbs_[i + limb_shift + 1] |= static_cast<std::uint32_t>(v >> 32);
    }
    out.trim();
    return out;
}

BigUint BigUint::operator>>(std::size_t bits) const {
    const std::size_t limb_shift = bits / 32;
    if (limb_shift >= limbs_.size()) return {};
    const std::size_t bit_shift = bits % 32;
    BigUint out;
    out.limbs_.assign(limbs_.size() - limb_shift, 0);
    for (std::size_t i = 0; i < out.limbs_.size(); ++i) {
        std::uint64_t v = static_cast<std::uint64_t>(limbs_[i + limb_shift]) >> bit_shift;
        if (bit_shift != 0 && i + limb_shift + 1 < limbs_.size())
            v |= static_cast<std::uint64_t>(limbs_[i + limb_shift + 1]) << (32 - bit_shift);
        out.limbs_[i] = static_cast<std::uint32_t>(v & 0xFFFFFFFF);
    }
    out.trim();
    return out;
}

// Knuth algorithm D with 32-bit limbs.
BigUint::DivMod BigUint::divmod(const BigUint& a, const BigUint& b) {
    if (b.is_zero()) fail(ErrorKind::Domain, "BigUint division by zero");
    if (a.compare(b) < 0) return {BigUint{}, a};

    if (b.limbs_.size() == 1) {
        const std::uint64_t d = b.limbs_[0];
        BigUint q;
        q.limbs_.assign(a.limbs_.size(), 0);
        std::uint64_t rem = 0;
        for (std::size_t i = a.limbs_.size(); i-- > 0;) {
            const std::uint64_t cur = (rem << 32) | a.limbs_[i];
            q.limbs_[i] = static_cast<std::uint32_t>(cur / d);
            rem = cur % d;
        }
        q.trim();
        return {q, BigUint{rem}};
    }

    const std::size_t shift = static_cast<std::size_t>(std::countl_zero(b.limbs_.back()));
    BigUint u = a << shift;
    const BigUint v = b << shift;
    const std::size_t n = v.limbs_.size();
    u.limbs_.resize(std::max(u.limbs_.size(), a.limbs_.size()) + 1, 0);
    const std::size_t m = u.limbs_.size() - n - 1;

    BigUint q;
    q.limbs_.assign(m + 1, 0);

    const std::uint64_t v_top = v.limbs_[n - 1];
    const std::uint64_t v_next = v.limbs_[n - 2];

    for (std::size_t j = m + 1; j-- > 0;) {
        const std::uint64_t numerator =
            (static_cast<std::uint64_t>(u.limbs_[j + n]) << 32) | u.limbs_[j + n - 1];
        std::uint64_t qhat = numerator / v_top;
        std::uint64_t rhat = numerator % v_top;

        while (qhat >= kBase ||
               qhat * v_next > ((rhat << 32) | u.limbs_[j + n - 2])) {
            --qhat;
            rhat += v_top;
            if (rhat >= kBase) break;
        }

        // multiply and subtract: u[j..j+n] -= qhat * v
        std::int64_t borrow = 0;
        std::uint64_t carry = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint64_t product = qhat * v.limbs_[i] + carry;
            carry = product >> 32;
            std::int64_t diff = static_cast<std::int64_t>(u.limbs_[i + j]) -
                                static_cast<std::int64_t>(product & 0xFFFFFFFF) - borrow;
            if (diff < 0) {
                diff += static_cast<std::int64_t>(kBase);
                borrow = 1;
            } else {
                borrow = 0;
            }
            u.limbs_[i + j] = static_cast<std::uint32_t>(diff);
        }
        std::int64_t top = static_cast<std::int64_t>(u.limbs_[j + n]) -
                           static_cast<std::int64_t>(carry) - borrow;
        if (top < 0) {
            // qhat was one too large: add v back
            top += static_cast<std::int64_t>(kBase);
            --qhat;
            std::uint64_t add_carry = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const std::uint64_t sum =
                    static_cast<std::uint64_t>(u.limbs_[i + j]) + v.limbs_[i] + add_carry;
                u.limbs_[i + j] = static_cast<std::uint32_t>(sum & 0xFFFFFFFF);
                add_carry = sum >> 32;
            }
            top += static_cast<std::int64_t>(add_carry);
            top &= static_cast<std::int64_t>(0xFFFFFFFF);
        }
        u.limbs_[j + n] = static_cast<std::uint32_t>(top);
        q.limbs_[j] = static_cast<std::uint32_t>(qhat);
    }

    q.trim();
    u.limbs_.resize(n);
    u.trim();
    return {q, u >> shift};
}

BigUint BigUint::operator/(const BigUint& b) const { return divmod(*this, b).quotient; }
BigUint BigUint::operator%(const BigUint& b) const { return divmod(*this, b).remainder; }

BigUint BigUint::modpow(const BigUint& base, const BigUint& exp, const BigUint& mod) {
    if (mod.is_zero()) fail(ErrorKind::Domain, "modpow with zero modulus");
    if (mod == BigUint{1}) return {};
    BigUint result{1};
    BigUint b = base % mod;
    const std::size_t bits = exp.bit_length();
    for (std::size_t i = 0; i < bits; ++i) {
        if (exp.bit(i)) result = (result * b) % mod;
        b = (b * b) % mod;
    }
    return result;
}

BigUint BigUint::gcd(BigUint a, BigUint b) {
    while (!b.is_zero()) {
        BigUint r = a % b;
        a = b;
        b = r;
    }
    return a;
}

BigUint BigUint::lcm(const BigUint& a, const BigUint& b) {
    if (a.is_zero() || b.is_zero()) return {};
    return (a / gcd(a, b)) * b;
}

BigUint BigUint::modinv(const BigUint& a, const BigUint& m) {
    // Extended Euclid with sign-tracked coefficients.
    BigUint r0 = m, r1 = a % m;
    BigUint t0{}, t1{1};
    bool neg0 = false, neg1 = false;

    while (!r1.is_zero()) {
        DivMod dm = divmod(r0, r1);
        r0 = r1;
        r1 = dm.remainder;

        // t_next = t0 - q * t1
        const BigUint qt = dm.quotient * t1;
        BigUint t_next;
        bool neg_next;
        if (neg0 == neg1) {
            if (t0 >= qt) {
                t_next = t0 - qt;
                neg_next = neg0;
            } else {
                t_next = qt - t0;
                neg_next = !neg1;
            }
        } else {
            t_next = t0 + qt;
            neg_next = neg0;
        }
        t0 = t1;
        neg0 = neg1;
        t1 = t_next;
        neg1 = neg_next;
    }

    if (r0 != BigUint{1}) fail(ErrorKind::Key, "value not invertible modulo m");
    BigUint result = t0 % m;
    if (neg0 && !result.is_zero()) result = m - result;
    return result;
}

BigUint BigUint::random_below(Rng& rng, const BigUint& bound) {
    if (bound.is_zero()) return {};
    const std::size_t bits = bound.bit_length();
    while (true) {
        BigUint candidate;
        const std::size_t limbs = (bits + 31) / 32;
        candidate.limbs_.resize(limbs);
        for (std::size_t i = 0; i < limbs; ++i) candidate.limbs_[i] = rng.next_u32();
        const std::size_t excess = limbs * 32 - bits;
        if (excess > 0 && excess < 32)
            candidate.limbs_.back() &= (0xFFFFFFFFu >> excess);
        else if (excess >= 32)
            candidate.limbs_.back() = 0;
        candidate.trim();
        if (candidate < bound) return candidate;
    }
}

BigUint BigUint::random_bits(Rng& rng, std::size_t bits) {
    if (bits == 0) return {};
    BigUint out;
    const std::size_t limbs = (bits + 31) / 32;
    out.limbs_.resize(limbs);
    for (std::size_t i = 0; i < limbs; ++i) out.limbs_[i] = rng.next_u32();
    const std::size_t top_bit = (bits - 1) % 32;
    out.limbs_.back() &= (top_bit == 31) ? 0xFFFFFFFFu : ((1u << (top_bit + 1)) - 1);
    out.limbs_.back() |= 1u << top_bit;
    out.trim();
    return out;
}

bool BigUint::is_probable_prime(const BigUint& n, Rng& rng) {
    if (n < BigUint{2}) return false;
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull,
                            29ull, 31ull, 37ull}) {
        const BigUint bp{p};
        if (n == bp) return true;
        if ((n % bp).is_zero()) return false;
    }

    const BigUint n_minus_1 = n - BigUint{1};
    std::size_t s = 0;
    BigUint d = n_minus_1;
    while (!d.is_odd()) {
        d = d >> 1;
        ++s;
    }

    auto witness_says_composite = [&](const BigUint& a) {
        BigUint x = modpow(a, d, n);
        if (x == BigUint{1} || x == n_minus_1) return false;
        for (std::size_t i = 1; i < s; ++i) {
            x = (x * x) % n;
            if (x == n_minus_1) return false;
        }
        return true;
    };

    // Deterministic for n < 2^64; extra seeded rounds cover larger inputs.
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull,
                            29ull, 31ull, 37ull}) {
        if (witness_says_composite(BigUint{a})) return false;
    }
    if (n.bit_length() > 64) {
        for (int round = 0; round < 20; ++round) {
            BigUint a = random_below(rng, n - BigUint{3}) + BigUint{2};
            if (witness_says_composite(a)) return false;
        }
    }
    return true;
}

BigUint BigUint::random_prime(Rng& rng, std::size_t bits) {
    if (bits < 2) fail(ErrorKind::Key, "prime width below 2 bits");
    const std::size_t max_attempts = 64 * bits + 512;
    for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
        BigUint candidate = random_bits(rng, bits);
        if (!candidate.is_odd()) candidate = candidate + BigUint{1};
        if (candidate.bit_length() != bits) continue;
        if (is_probable_prime(candidate, rng)) return candidate;
    }
    fail(ErrorKind::Key, "prime search exhausted");
}

} // namespace dshrpl
