#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace parnet {

/// Distribution helpers over std::mt19937_64. The standard library's
/// distribution objects are implementation-defined, so datasets would not
/// reproduce across toolchains; these fixed mappings do.
namespace rng {

/// Uniform double in [0, 1), 53 random mantissa bits.
inline double uniform(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

/// Uniform double in the open interval (0, 1).
inline double uniform_open(std::mt19937_64& g) {
    double u = uniform(g);
    while (u == 0.0) u = uniform(g);
    return u;
}

inline double uniform(std::mt19937_64& g, double lo, double hi) {
    return std::lerp(lo, hi, uniform(g));
}

/// Uniform integer in [0, n).
inline std::uint64_t below(std::mt19937_64& g, std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform(g) * static_cast<double>(n));
}

/// Standard normal via Box-Muller, two fresh uniforms per draw.
inline double normal(std::mt19937_64& g) {
    double u1 = 1.0 - uniform(g);  // (0, 1] keeps the log finite
    double u2 = uniform(g);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

inline double normal(std::mt19937_64& g, double mu, double sigma) {
    return mu + sigma * normal(g);
}

/// In-place Fisher-Yates with the fixed uniform mapping above.
template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& g) {
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[below(g, i)]);
}

/// Stream salts: one generator per purpose so consuming one stream never
/// shifts another (curve identity survives a change of sampling mode).
inline constexpr std::uint64_t kSamplingSalt = 0x9E3779B97F4A7C15ull;
inline constexpr std::uint64_t kSplitSalt = 0xD1B54A32D192ED03ull;
inline constexpr std::uint64_t kTrainingSalt = 0xA0761D6478BD642Full;

/// SplitMix64 finalizer; a bijection that scatters structured input.
inline std::uint64_t scramble(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// One generator per (master, index, purpose) triple. The inputs pass
/// through scramble before seeding: a plain xor combine would let nearby
/// master seeds reuse each other's per-index streams (42^803 == 777^0),
/// silently sharing curves between independently seeded datasets.
inline std::mt19937_64 derive(std::uint64_t master, std::uint64_t index,
                              std::uint64_t salt = 0) {
    return std::mt19937_64(scramble(master + scramble(index + salt)));
}

}  // namespace rng

}  // namespace parnet
