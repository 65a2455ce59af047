#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace coclab {

/// SplitMix64 finalizer. Used to derive independent stream states from a
/// (seed, stream_id) pair so that parallel and serial runs draw identical
/// per-trial sequences.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// xoshiro256** stream, counter-seeded: stream i of a run with seed s is
/// fully determined by (s, i). Distributions are hand-rolled on top of the
/// raw 64-bit output so results are bit-identical across compilers.
class rng_stream {
  public:
    rng_stream(std::uint64_t seed, std::uint64_t stream_id) {
        std::uint64_t st = seed ^ mix64(stream_id ^ 0xA3C59AC2F0B2F2ECULL);
        for (auto& word : s_) {
            st = mix64(st);
            word = st;
        }
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0)
            s_[0] = 0x9E3779B97F4A7C15ULL;
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1).
    double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller (two uniforms per draw, no caching,
    /// so the consumed stream length is input-independent).
    double gauss() {
        double u1 = u01();
        while (u1 == 0.0)
            u1 = u01();
        const double u2 = u01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

  private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

} // namespace coclab
