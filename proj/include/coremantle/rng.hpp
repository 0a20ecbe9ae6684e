// Seeded random streams with a documented substream splitting rule.
//
// Every Monte Carlo loop in this project draws from an explicit Stream.
// Substream k of master seed S is the mt19937_64 engine seeded with
//     splitmix64(splitmix64(S) ^ splitmix64(k + 1)),
// so (seed, stream-id) pairs map to decorrelated engines and parallel
// loops stay reproducible under any thread count.
#pragma once

#include <cstdint>
#include <random>

namespace coremantle::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

class Stream {
public:
    explicit Stream(std::uint64_t seed, std::uint64_t stream_id = 0)
        : engine_(splitmix64(splitmix64(seed) ^ splitmix64(stream_id + 1))) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform double in [0, 1) with 53 random bits. Avoids
    // std::generate_canonical so draws are identical across stdlibs.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform01() < p; }

private:
    std::mt19937_64 engine_;
};

} // namespace coremantle::rng
