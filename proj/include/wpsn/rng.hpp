// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace wpsn {

// std::*_distribution output is implementation-defined, so simulations
// seeded the same way would differ between standard libraries. All random
// draws go through this stream instead; mt19937_64 itself is fully
// specified by the standard.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Independent sub-stream seed for (purpose, index) under one master seed.
// Adding nodes or purposes never perturbs the draws of existing streams.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t purpose,
                                 std::uint64_t index) {
    std::uint64_t s = master ^ (0x94d049bb133111ebULL * (purpose + 1));
    std::uint64_t a = splitmix64(s);
    s = a ^ (0x9e3779b97f4a7c15ULL * (index + 1));
    return splitmix64(s);
}

class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : eng_(seed) {}

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    int bernoulli(double p) { return uniform01() < p ? 1 : 0; }

    // Box-Muller without caching, so the draw count per call is fixed.
    double normal01() {
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    std::uint64_t raw() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

}  // namespace wpsn
