#pragma once

#include <cstdint>
#include <initializer_list>

namespace hgain::prf {

// Domain tags keep the streams of different consumers disjoint.
inline constexpr std::uint64_t kNestedTag = 0x4e45535445445f31ull;
inline constexpr std::uint64_t kNestedTailTag = 0x4e45535445445f54ull;
inline constexpr std::uint64_t kLinearTag = 0x4c494e4541525f31ull;
inline constexpr std::uint64_t kMonteCarloTag = 0x4d4f4e54455f4331ull;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Folds an ordered list of words into one key.
constexpr std::uint64_t derive_key(std::initializer_list<std::uint64_t> words) {
    std::uint64_t h = 0x6a09e667f3bcc908ull;
    for (auto w : words) h = mix(h ^ mix(w));
    return h;
}

/// Counter-mode stream over a fixed key: output k is mix(key, k).
class Stream {
public:
    explicit constexpr Stream(std::uint64_t key) : key_(key) {}

    constexpr std::uint64_t next() { return mix(key_ ^ mix(counter_++)); }

    /// Exactly uniform on {0, ..., bound - 1} (Lemire's multiply-shift with rejection).
    std::uint64_t below(std::uint64_t bound) {
        using u128 = unsigned __int128;
        u128 m = u128(next()) * bound;
        auto low = std::uint64_t(m);
        if (low < bound) {
            std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = u128(next()) * bound;
                low = std::uint64_t(m);
            }
        }
        return std::uint64_t(m >> 64);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() { return double(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace hgain::prf
