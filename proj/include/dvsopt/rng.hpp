#pragma once

#include <cstdint>

namespace dvsopt {

/// Counter-based deterministic random numbers.
///
/// Draws are pure functions of (seed, c0, c1, c2), so trials can be evaluated
/// in any order (or in parallel) and still reproduce bit-identically. The
/// mixer is the splitmix64 finalizer applied to the seed and each counter in
/// turn.
namespace rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Uniform double in [0, 1) from a seed and three stream counters.
inline double u01(std::uint64_t seed, std::uint64_t c0, std::uint64_t c1, std::uint64_t c2) {
    std::uint64_t h = mix64(seed + kGolden);
    h = mix64(h ^ (c0 + kGolden));
    h = mix64(h ^ (c1 + kGolden));
    h = mix64(h ^ (c2 + kGolden));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

/// Uniform double in [lo, hi).
inline double uniform(double lo, double hi, std::uint64_t seed, std::uint64_t c0,
                      std::uint64_t c1, std::uint64_t c2) {
    return lo + (hi - lo) * u01(seed, c0, c1, c2);
}

} // namespace rng
} // namespace dvsopt
