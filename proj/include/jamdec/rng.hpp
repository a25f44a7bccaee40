#pragma once

#include <cstdint>
#include <random>

namespace jamdec {

// All randomness flows through std::mt19937_64 instances, but the draw
// helpers below avoid std::*_distribution so that traces are reproducible
// across standard library implementations, not just across runs.

inline double uniform01(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n). n must be >= 1.
inline int uniform_below(std::mt19937_64& g, int n) {
    int k = static_cast<int>(uniform01(g) * n);
    return k < n ? k : n - 1;
}

inline bool bernoulli(std::mt19937_64& g, double p) {
    return uniform01(g) < p;
}

// splitmix64 step; used to derive independent sub-seeds from a run seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (tag + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace jamdec
