#pragma once

#include <cstdint>
#include <random>

namespace kreg {

/// Seedable generator with a pinned algorithm: std::mt19937_64 (fully specified by
/// the standard) for raw bits, 53-bit uniforms, and Marsaglia's polar method for
/// normal variates. std::*_distribution is avoided because its output is
/// implementation defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();

    /// Uniform on (0, 1).
    double uniform_open();

    /// Standard normal variate.
    double normal();

    /// Uniform integer in [0, bound) by rejection sampling.
    std::uint64_t below(std::uint64_t bound);

private:
    std::mt19937_64 engine_;
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

/// Independent stream seed for (seed, stream) via the SplitMix64 finalizer.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace kreg
