// rng.hpp
// Counter-based random numbers: every draw is a pure function of
// (key, counter), so Monte Carlo runs are reproducible and independent of
// sampling order or thread scheduling.

#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

namespace tspde::rng {

// splitmix64 finalizer; bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Fold several identifiers into one stream key.
inline std::uint64_t derive_key(std::uint64_t seed, std::uint64_t a) { return mix64(mix64(seed) ^ a); }
inline std::uint64_t derive_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return mix64(derive_key(seed, a) ^ mix64(b));
}

struct GaussianStream {
    std::uint64_t key = 0;

    double uniform(std::uint64_t counter) const {
        // in (0, 1]; never 0 so log() below is safe
        return (double(mix64(key ^ mix64(counter)) >> 11) + 1.0) * 0x1.0p-53;
    }

    // Independent standard normal pair, Box-Muller on two counter slots.
    std::pair<double, double> normal_pair(std::uint64_t counter) const {
        const double u1 = uniform(2 * counter);
        const double u2 = uniform(2 * counter + 1);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 6.283185307179586476925286766559 * u2;
        return {r * std::cos(phi), r * std::sin(phi)};
    }

    double normal(std::uint64_t counter) const { return normal_pair(counter).first; }
};

}  // namespace tspde::rng
