#pragma once

#include <cstdint>
#include <random>

namespace wallmem {

using Rng = std::mt19937_64;

// std::uniform_real_distribution is implementation defined; archives must be
// byte-identical across standard libraries, so draws are built from raw bits.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool fair_coin(Rng& rng) { return (rng() >> 63) != 0; }

/// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed for work unit `index` of a run seeded with `master`. Independent of
/// execution order, so sweeps give the same records serially or in parallel.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(mix64(master) ^ mix64(index + 0x632BE59BD9B4E019ULL));
}

}  // namespace wallmem
