#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace parktrack {

// Sampling helpers on top of std::mt19937_64. The engine itself is fully
// specified by the standard; the std:: distributions are not, so everything
// seeded here goes through these functions to keep identical seeds producing
// identical streams on every platform.

/// Uniform double in [0, 1), 53 payload bits.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double in [lo, hi).
inline double uniform_range(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

/// Uniform index in [0, n). Rejection sampling, unbiased. n must be > 0.
inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t bound = max - max % n;
    std::uint64_t x = rng();
    while (x >= bound) {
        x = rng();
    }
    return static_cast<std::size_t>(x % n);
}

/// Standard normal via Box-Muller. Consumes two uniforms per call.
inline double standard_normal(std::mt19937_64& rng) {
    constexpr double two_pi = 6.283185307179586476925287;
    double u1 = uniform01(rng);
    while (u1 == 0.0) {
        u1 = uniform01(rng);
    }
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

}  // namespace parktrack
