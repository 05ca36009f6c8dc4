#pragma once

#include <cstdint>

namespace starkafc {

// Counter-based uniforms: every draw is a pure hash of (seed, stream, counter),
// so results do not depend on evaluation order or thread count.
namespace rng {

inline std::uint64_t mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t hash3(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return mix(seed ^ mix(stream ^ mix(counter)));
}

// Uniform in [0, 1).
inline double uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return static_cast<double>(hash3(seed, stream, counter) >> 11) * 0x1.0p-53;
}

}  // namespace rng
}  // namespace starkafc
