#pragma once

#include <array>
#include <cstdint>

namespace riskbias {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline void mulhilo64(std::uint64_t a, std::uint64_t b,
                      std::uint64_t& hi, std::uint64_t& lo) {
    unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
}

} // namespace detail

// Philox 4x64 with 10 rounds. Counter-based: block(k) is a pure function of
// the key and the 256-bit counter, so any draw can be computed independently
// of scheduling. Output matches NumPy's Philox bit generator for the same
// key/counter.
struct Philox4x64 {
    static constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
    static constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
    static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
    static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

    static std::array<std::uint64_t, 4> block(std::array<std::uint64_t, 2> key,
                                              std::array<std::uint64_t, 4> ctr) {
        for (int round = 0; round < 10; ++round) {
            std::uint64_t hi0, lo0, hi1, lo1;
            detail::mulhilo64(kMul0, ctr[0], hi0, lo0);
            detail::mulhilo64(kMul1, ctr[2], hi1, lo1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }
};

// Seeded stream of uniforms with cheap, collision-safe substream derivation.
// Each logical unit of work (replicate, window, grid point) should own
// substream(index); streams never overlap regardless of how much either side
// consumes, which is what makes every pipeline deterministic under any
// worker count.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed)
        : key_{detail::splitmix64(seed),
               detail::splitmix64(seed ^ 0x6A09E667F3BCC909ULL)} {}

    RandomStream(std::uint64_t key0, std::uint64_t key1) : key_{key0, key1} {}

    RandomStream substream(std::uint64_t id) const {
        std::uint64_t a = detail::splitmix64(key_[0] ^ detail::splitmix64(0x243F6A8885A308D3ULL ^ id));
        std::uint64_t b = detail::splitmix64(key_[1] + detail::splitmix64(0x452821E638D01377ULL + id));
        return RandomStream(a, b);
    }

    std::uint64_t next_u64() {
        if (pos_ == 4) {
            buffer_ = Philox4x64::block(key_, {block_, 0, 0, 0});
            ++block_;
            pos_ = 0;
        }
        return buffer_[pos_++];
    }

    // Uniform on the open interval (0, 1); safe to feed into quantile
    // functions with infinite endpoints.
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    std::array<std::uint64_t, 2> key() const { return key_; }

  private:
    std::array<std::uint64_t, 2> key_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 4> buffer_{};
    int pos_ = 4;
};

} // namespace riskbias
