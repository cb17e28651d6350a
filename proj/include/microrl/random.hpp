#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace microrl {

using Rng = std::mt19937_64;

/// Seed for a named, indexed stream derived from one master seed, so that e.g.
/// exploration draws never shift simulator or initialisation randomness.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view stream, std::uint64_t index = 0) {
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : stream) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    // splitmix64 finaliser over the combined words
    std::uint64_t z = master ^ (h + 0x9E3779B97F4A7C15ULL + (index << 6) + (index >> 2));
    z += index * 0xD1B54A32D192ED03ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace microrl
