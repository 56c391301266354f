#pragma once

#include <cstdint>

namespace helios {

/// splitmix64-style mixer for deriving independent RNG streams from a base
/// seed and a stream tag.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t tag) {
    std::uint64_t x = base + 0x9E3779B97F4A7C15ULL * (tag + 1);
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

}  // namespace helios
