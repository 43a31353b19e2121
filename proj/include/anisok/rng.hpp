#pragma once

#include <cstdint>
#include <random>

namespace anisok {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of replicate `index` in the campaign keyed by `campaign_seed`.
constexpr std::uint64_t replicate_seed(std::uint64_t campaign_seed, std::uint64_t index) {
    return mix64(mix64(campaign_seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

/// Generator for one stream; distinct `stream` tags give independent
/// sub-streams for the same seed.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x4b2d11c5U};
    return Rng(seq);
}

}  // namespace anisok
