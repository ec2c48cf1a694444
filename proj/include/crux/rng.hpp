#pragma once

#include <cstdint>
#include <random>

namespace crux {

// Uniform in [0,1) from the top 53 bits of the generator output.
// std::uniform_real_distribution is implementation-defined, which would break
// seed-for-seed reproducibility across standard libraries.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform index in [0, bound). Modulo bias is negligible for bound << 2^64.
inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t bound) {
    return rng() % bound;
}

}  // namespace crux
