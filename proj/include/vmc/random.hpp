#pragma once

#include <cstdint>
#include <random>

namespace vmc {

/// The single per-run random stream.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits of one draw.
[[nodiscard]] inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// One Bernoulli trial. Always consumes exactly one draw so the stream
/// position depends only on how many trials were made.
[[nodiscard]] inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

}  // namespace vmc
