#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace scnd {

/// SplitMix64 output finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// FNV-1a over the bytes of `name`.
constexpr std::uint64_t hash_name(std::string_view name) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Folds a sequence of words into one stream key. Order matters.
constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t a) noexcept {
    return mix64(seed ^ mix64(a + 0x9e3779b97f4a7c15ULL));
}

template <typename... Rest>
constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t a, Rest... rest) noexcept {
    return derive_key(derive_key(seed, a), static_cast<std::uint64_t>(rest)...);
}

/// Counter-based random stream (SplitMix64). Cheap to construct, so every
/// replicate cell can own one derived from its coordinates.
///
/// Distribution transforms are written out here rather than taken from
/// <random> so draws are identical across standard library implementations.
class Stream {
public:
    using result_type = std::uint64_t;

    explicit constexpr Stream(std::uint64_t key) noexcept : state_(key) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        ++draws_;
        return mix64(state_);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1].
    double uniform_open_closed() noexcept {
        return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Standard normal by Box-Muller (two raw draws per call, no caching).
    double normal() noexcept;

    /// +1 or -1 with equal probability.
    double rademacher() noexcept { return ((*this)() >> 63) != 0 ? -1.0 : 1.0; }

    std::uint64_t draws() const noexcept { return draws_; }

private:
    std::uint64_t state_;
    std::uint64_t draws_ = 0;
};

}  // namespace scnd
