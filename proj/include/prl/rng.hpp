#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace prl {

using Rng = std::mt19937_64;

// SplitMix64 mixing step; used to derive independent stream seeds from a
// single root seed so that e.g. evaluation rollouts never perturb the
// training stream.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
    return Rng(splitmix64(splitmix64(seed) ^ splitmix64(0xd1b54a32d192ed03ull + stream)));
}

// Inclusive bounds.
inline int uniform_int(Rng& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double uniform01(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

template <typename T>
const T& pick(std::span<const T> items, Rng& rng) {
    return items[uniform_int(rng, 0, static_cast<int>(items.size()) - 1)];
}

}  // namespace prl
