#pragma once

#include <cstdint>

namespace shapes {

// SplitMix64 (Steele, Lea, Flood 2014). Chosen as the project-wide PRNG because
// it is tiny, 64-bit, splittable, and trivially reproducible across languages.
// All stochastic components (annealer, verification sampling) draw from this
// generator only, so a (seed, config) pair pins every run bit-for-bit.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n). n must be positive. Uses rejection to avoid
    // modulo bias so that sequences stay portable.
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % n;
    }

    // Derives an independent stream; used to fan seeds out to parallel jobs.
    SplitMix64 split() { return SplitMix64(next_u64()); }

private:
    std::uint64_t state_;
};

}  // namespace shapes
