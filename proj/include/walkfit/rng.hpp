#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

namespace walkfit {

/// splitmix64 step: advances `state` and returns the next output word.
/// Used for seeding and for deriving child seeds; never as a main generator.
inline std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Derives a child seed from a master seed and an index (or purpose tag).
///
/// The derivation is two splitmix64 rounds with the index folded in between,
/// so child streams for different indices are statistically independent and
/// the mapping is stable across platforms: ensembles can be generated in
/// parallel, one stream per trajectory index, and still match a serial run.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
    std::uint64_t s = master;
    const std::uint64_t mixed = splitmix64(s);
    s = mixed ^ (index + 0x9E3779B97F4A7C15ULL);
    return splitmix64(s);
}

/// xoshiro256++ stream with splitmix64 seeding.
///
/// All stochastic operations in the library consume randomness exclusively
/// through this class, in a documented per-operation draw order, which makes
/// every simulation a pure function of its seed.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) noexcept {
        std::uint64_t s = seed;
        state_[0] = splitmix64(s);
        state_[1] = splitmix64(s);
        state_[2] = splitmix64(s);
        state_[3] = splitmix64(s);
    }

    /// Stream for ensemble member `index` under `master`.
    static RandomStream substream(std::uint64_t master, std::uint64_t index) noexcept {
        return RandomStream(derive_seed(master, index));
    }

    std::uint64_t next_u64() noexcept {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform variate strictly inside (0, 1): 53-bit resolution, offset by
    /// half an ulp so 0 and 1 are unreachable (log() and pow() stay finite).
    double next_unit() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double next_uniform(double lo, double hi) noexcept {
        return lo + (hi - lo) * next_unit();
    }

    /// Box-Muller transform of two unit uniforms.
    static std::pair<double, double> box_muller(double u1, double u2) noexcept {
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * kPi * u2;
        return {r * std::cos(a), r * std::sin(a)};
    }

    /// Pair of independent standard normal variates (consumes two uniforms).
    std::pair<double, double> next_normal_pair() noexcept {
        const double u1 = next_unit();
        const double u2 = next_unit();
        return box_muller(u1, u2);
    }

    static constexpr double kPi = 3.141592653589793238462643383279502884;

private:
    static std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

} // namespace walkfit
