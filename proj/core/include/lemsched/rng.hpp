#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace lemsched {

/// SplitMix64 finalizer. Used to derive per-index seeds so that parallel and
/// sequential generation agree bit for bit.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) noexcept {
    return mix64(base ^ mix64(tag));
}

/// mt19937_64 with distribution code written out here, since the standard
/// library distributions are not specified bit-exactly across vendors.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Unit-mean exponential.
    double exponential() { return -std::log1p(-uniform()); }
    bool bernoulli_half() { return (engine_() >> 63) != 0; }

private:
    std::mt19937_64 engine_;
};

}  // namespace lemsched
