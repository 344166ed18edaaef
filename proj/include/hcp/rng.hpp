// Seedable, splittable deterministic random generator.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. The std distributions are implementation-defined, so bounded
// integers and reals are derived here to keep results identical everywhere.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hcp {

/// SplitMix64 finalizer; used for seed derivation.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(splitmix64(seed)) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, bound); bound must be > 0. Unbiased (rejection).
    std::uint64_t uniform(std::uint64_t bound) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    /// Uniform real in [0, 1) with 53 bits of precision.
    double uniform_real() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Exponential variate with the given rate (> 0).
    double exponential(double rate) { return -std::log1p(-uniform_real()) / rate; }

    /// Independent child generator; `stream` distinguishes siblings.
    Rng split(std::uint64_t stream = 0) { return Rng(splitmix64(engine_() ^ splitmix64(stream + 1))); }

    /// Child seed for callers that need to ship a plain seed to a worker.
    std::uint64_t split_seed(std::uint64_t stream = 0) { return splitmix64(engine_() ^ splitmix64(stream + 1)); }

private:
    std::mt19937_64 engine_;
};

}  // namespace hcp
