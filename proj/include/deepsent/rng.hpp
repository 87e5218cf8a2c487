#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace deepsent {

// Philox4x32-10 block function. Counter-based so that independent streams can
// be derived by key alone and replayed without serializing generator state.
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t kMul0 = 0xD2511F53u;
    constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = std::uint64_t(kMul0) * ctr[0];
        const std::uint64_t p1 = std::uint64_t(kMul1) * ctr[2];
        const std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
        const std::uint32_t hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

inline std::uint64_t mix64(std::uint64_t x) {
    // splitmix64 finalizer
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

// One deterministic random stream. The key identifies the stream, the salt
// occupies the upper counter words, and draws advance the lower counter.
class Rng {
public:
    explicit Rng(std::uint64_t key64, std::uint64_t salt = 0)
        : key_{std::uint32_t(key64), std::uint32_t(key64 >> 32)}, salt_(salt) {}

    // Derives a stream key from a seed and a list of labels (indices, hashes).
    static Rng keyed(std::uint64_t seed, std::initializer_list<std::uint64_t> labels) {
        std::uint64_t h = mix64(seed ^ 0xA0761D6478BD642Full);
        for (std::uint64_t label : labels) h = mix64(h ^ mix64(label));
        return Rng(h, mix64(h ^ 0xE7037ED1A0B428DBull));
    }

    std::uint32_t next_u32() {
        if (buf_pos_ == 4) {
            buf_ = philox4x32({std::uint32_t(counter_), std::uint32_t(counter_ >> 32),
                               std::uint32_t(salt_), std::uint32_t(salt_ >> 32)},
                              key_);
            ++counter_;
            buf_pos_ = 0;
        }
        return buf_[buf_pos_++];
    }

    std::uint64_t next_u64() {
        const std::uint64_t lo = next_u32();
        const std::uint64_t hi = next_u32();
        return lo | (hi << 32);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Multiply-shift; bias is negligible for the small n used here.
        return std::uint64_t((__uint128_t(next_u64()) * n) >> 64);
    }

    // Standard normal via the Marsaglia polar method (sqrt/log only).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

    template <typename It>
    void shuffle(It first, It last) {
        const auto n = std::uint64_t(last - first);
        for (std::uint64_t i = n; i > 1; --i) {
            const std::uint64_t j = below(i);
            std::swap(first[i - 1], first[j]);
        }
    }

private:
    std::array<std::uint32_t, 2> key_;
    std::uint64_t salt_;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int buf_pos_ = 4;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace deepsent
