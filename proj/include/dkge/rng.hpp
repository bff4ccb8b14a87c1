#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace dkge {

// Deterministic RNG shared by training, sampling, and solver completions.
// Draws are derived from the raw mt19937_64 stream by hand so that results
// never depend on the standard library's distribution implementations.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next_u64() { return gen_(); }

    // Uniform integer in [0, bound), bound > 0. Rejection keeps it unbiased.
    uint64_t below(uint64_t bound) {
        const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return x % bound;
    }

    // Uniform in [0, 1) with 53 bits of precision.
    double next_double() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    int sign() { return (gen_() & 1u) ? +1 : -1; }

    // Standard normal via Box-Muller. One value per call; the unused sine
    // branch is dropped to keep the draw sequence easy to reason about.
    double normal() {
        double u1;
        do {
            u1 = next_double();
        } while (u1 <= 0.0);
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace dkge
