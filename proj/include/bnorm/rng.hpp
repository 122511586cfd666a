#pragma once

// Counter-based SplitMix64 streams.
//
// A stream is identified by (seed, stream index). Its key is
//     key = mix(seed ^ mix(0xD1B54A32D192ED03 * (stream + 1)))
// and the i-th 64-bit output (i = 0, 1, ...) is
//     x_i = mix(key + (i + 1) * 0x9E3779B97F4A7C15)
// with the SplitMix64 finalizer
//     mix(z): z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//             z ^= z >> 27; z *= 0x94D049BB133111EB;
//             z ^= z >> 31.
// Uniforms on the open interval (0, 1) are ((x >> 11) + 0.5) * 2^-53.
// Standard normals come in Box-Muller pairs from two consecutive uniforms
// u1, u2: r = sqrt(-2 ln u1), (r cos 2 pi u2, r sin 2 pi u2).

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace bnorm {

inline constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;
inline constexpr std::uint64_t kStreamMultiplier = 0xD1B54A32D192ED03ULL;

/// Derives an independent seed from a parent seed and a tag (used to give the
/// two sides of a dual-representation check unrelated sample paths).
inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
    return splitmix64_mix(seed ^ splitmix64_mix(kStreamMultiplier * (tag + 0x5851F42D4C957F2DULL)));
}

class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(splitmix64_mix(seed ^ splitmix64_mix(kStreamMultiplier * (stream + 1)))) {}

    std::uint64_t next_u64() {
        ++counter_;
        return splitmix64_mix(key_ + counter_ * kGoldenGamma);
    }

    /// Uniform on (0, 1); never returns 0 or 1.
    double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    std::pair<double, double> normal_pair() {
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double ang = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(ang), r * std::sin(ang)};
    }

    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace bnorm
