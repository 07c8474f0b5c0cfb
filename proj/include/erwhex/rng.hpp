#pragma once

// Seeded random streams. Every replication gets its own xoshiro256** state
// derived from (base seed, tags..., replication index) through SplitMix64, so
// a replication's draws do not depend on which thread runs it.

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <string_view>

namespace erwhex {

inline constexpr std::string_view kRngAlgorithm = "xoshiro256**/splitmix64-stream-v1";

constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Folds a list of tags into a single 64-bit stream key.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags) noexcept {
    std::uint64_t state = base;
    std::uint64_t key = splitmix64(state);
    for (auto t : tags) {
        state ^= t + 0x632BE59BD9B4E019ULL + (key << 6) + (key >> 2);
        key = splitmix64(state);
    }
    return key;
}

class Rng {
public:
    using result_type = std::uint64_t;

    constexpr explicit Rng(std::uint64_t seed) noexcept {
        std::uint64_t x = seed;
        for (auto& w : s_) w = splitmix64(x);
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
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

    /// Uniform on [0, 1) with 53 random bits.
    constexpr double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform on {0, ..., bound-1}; Lemire's multiply-and-reject, exact for any bound > 0.
    constexpr std::uint64_t below(std::uint64_t bound) noexcept {
        unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<unsigned __int128>((*this)()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    constexpr bool coin() noexcept { return ((*this)() >> 63) != 0; }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4]{};
};

}  // namespace erwhex
