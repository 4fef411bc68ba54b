#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace embaudit {

// SplitMix64 finalizer (Steele, Lea & Flood). Used for seeding and for
// deriving substream keys.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// FNV-1a, 64-bit. Turns labels (statement ids, group names) into stream keys.
constexpr std::uint64_t fnv1a64(std::string_view text) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

// Key for the substream identified by (seed, ids...). Order of ids matters.
constexpr std::uint64_t derive_stream(std::uint64_t seed,
                                      std::initializer_list<std::uint64_t> ids) noexcept {
    std::uint64_t key = splitmix64(seed);
    for (std::uint64_t id : ids) key = splitmix64(key ^ splitmix64(id + 0x632BE59BD9B4E019ULL));
    return key;
}

// xoshiro256** 1.0 (Blackman & Vigna), state filled from SplitMix64 of the
// key. Fully specified here so streams are identical on every platform.
class Xoshiro256 {
public:
    explicit Xoshiro256(std::uint64_t key) noexcept {
        std::uint64_t x = key;
        for (auto& word : state_) {
            x += 0x9E3779B97F4A7C15ULL;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
            word = z ^ (z >> 31);
        }
    }

    std::uint64_t next() noexcept {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform integer in [0, bound) by Lemire's multiply-and-reject method.
    std::uint64_t below(std::uint64_t bound) noexcept {
        __extension__ using u128 = unsigned __int128;
        u128 m = static_cast<u128>(next()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<u128>(next()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // Uniform double in [0, 1) from the top 53 bits.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4]{};
};

}  // namespace embaudit
