#include "suptrap/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace suptrap {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    return splitmix64(splitmix64(seed) ^ (salt + 0x9e3779b97f4a7c15ULL));
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(mix_seed(seed, stream)) {}

std::uint64_t RngStream::next_u64() { return engine_(); }

double RngStream::uniform() {
    // 53 random bits, shifted to the cell centre: strictly inside (0,1).
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

bool RngStream::bernoulli(double p) { return uniform() < p; }

double RngStream::exponential(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate))
        throw std::invalid_argument("exponential: rate must be positive and finite");
    return -std::log(1.0 - uniform()) / rate;
}

double RngStream::normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(2.0 * M_PI * u2);
}

std::size_t RngStream::uniform_index(std::size_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: n must be positive");
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return static_cast<std::size_t>(x % n);
}

}  // namespace suptrap
