#pragma once

#include <cstdint>
#include <random>

#include "epprobit/special_fn.hpp"

namespace epprobit {

// Deterministic random stream. Uniform and normal variates are derived
// from the raw 64-bit output with fixed arithmetic (no std::*_distribution),
// so a seed reproduces the same doubles on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on the open interval (0, 1).
    double uniform01() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() { return norm_quantile(uniform01()); }

private:
    std::mt19937_64 engine_;
};

// Mixes stream identifiers into sub-seeds (splitmix64 finalizer), so
// independent components of a run get decorrelated deterministic streams.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace epprobit
