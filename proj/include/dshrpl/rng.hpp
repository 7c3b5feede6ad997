#pragma once

#include <cstdint>

namespace dshrpl {

// SplitMix64 generator. Standard-library distributions are not portable
// across implementations, so all randomness in the simulator goes through
// this generator and the helpers below.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint32_t next_u32() { return static_cast<std::uint32_t>(next_u64() >> 32); }

    // Uniform in [0, bound). Rejection sampling keeps the draw unbiased.
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) return 0;
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % bound;
    }

    // Uniform double in [0, 1) with 53 bits of precision.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool chance(double p) {
        if (p <= 0.0) return false;
        if (p >= 1.0) return true;
        return next_double() < p;
    }

    // Derives an independent stream; used to give every node/purpose its own
    // generator so event ordering cannot perturb unrelated draws.
    Rng fork(std::uint64_t tag) const {
        Rng mix(state_ ^ (0xA0761D6478BD642FULL * (tag + 1)));
        mix.next_u64();
        return mix;
    }

private:
    std::uint64_t state_;
};

} // namespace dshrpl
