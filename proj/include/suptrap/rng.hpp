#pragma once

#include <cstdint>
#include <random>

namespace suptrap {

// Deterministic counter-seeded random stream. A given (seed, stream) pair
// produces the same draw sequence on every platform: std::mt19937_64 is
// bit-exact per the standard and all variate mappings below are implemented
// here instead of going through the implementation-defined std::*_distribution
// classes.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    std::uint64_t next_u64();

    // Uniform on the open interval (0, 1); never returns 0 or 1, so
    // bernoulli(p) can never fire for p below ~5.6e-17.
    double uniform();

    bool bernoulli(double p);

    // Exponential inter-arrival time, rate > 0.
    double exponential(double rate);

    // Standard normal via Box-Muller (two uniforms per call, no caching).
    double normal();

    // Uniform integer in {0, ..., n-1}, bias-free.
    std::size_t uniform_index(std::size_t n);

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
};

// SplitMix64-style mixing for deriving child seeds (sweep points, ensembles).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace suptrap
