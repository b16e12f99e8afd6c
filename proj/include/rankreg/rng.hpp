#pragma once

#include <cstdint>
#include <random>

namespace rankreg {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent generator for (seed, stream): replicate k always draws from the
/// same stream regardless of how replicates are scheduled.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t domain = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(splitmix64(stream)),
                      static_cast<std::uint32_t>(splitmix64(stream) >> 32),
                      static_cast<std::uint32_t>(domain)};
    return Rng(seq);
}

} // namespace rankreg
