#pragma once

#include <cmath>
#include <cstdint>

namespace sci {

/// Counter-based generator: every draw is a pure function of (seed, counter),
/// so streams are reproducible across platforms and independent of call order.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t counter) {
    return splitmix64(splitmix64(seed ^ 0xD6E8FEB86659FD93ULL) ^
                      (counter * 0x9E3779B97F4A7C15ULL));
}

/// Uniform draw in the open interval (0, 1).
inline double uniform_at(std::uint64_t seed, std::uint64_t counter) {
    return (static_cast<double>(counter_hash(seed, counter) >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal draw via Box-Muller; consumes counters 2n and 2n+1.
inline double gaussian_at(std::uint64_t seed, std::uint64_t n) {
    const double u1 = uniform_at(seed, 2 * n);
    const double u2 = uniform_at(seed, 2 * n + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

} // namespace sci
