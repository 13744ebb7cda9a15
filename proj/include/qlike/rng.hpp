#pragma once

#include <cstdint>
#include <random>

namespace qlike {

/// Seedable generator used everywhere randomness is needed.
///
/// Wraps std::mt19937_64 and derives uniforms and normals from its raw output
/// directly, so streams are bit-reproducible across standard libraries
/// (std::uniform_real_distribution and friends are implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller.
    double normal();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Independent stream seed for (seed, stream) using SplitMix64 mixing.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Fresh seed from the OS entropy source.
std::uint64_t entropy_seed();

}  // namespace qlike
