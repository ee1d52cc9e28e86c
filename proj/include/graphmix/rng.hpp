#pragma once

#include <array>
#include <cstdint>

namespace graphmix {

// Philox 4x32-10 counter-based block cipher (Salmon et al., SC'11).
// Streams are keyed by (seed) and addressed by (tag, trial, vertex, block),
// so any draw is reproducible regardless of evaluation order and trials are
// embarrassingly parallel.
struct Philox4x32 {
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t(kMul0) * ctr[0];
            const std::uint64_t p1 = std::uint64_t(kMul1) * ctr[2];
            const std::array<std::uint32_t, 4> next = {
                std::uint32_t(p1 >> 32) ^ ctr[1] ^ key[0],
                std::uint32_t(p1),
                std::uint32_t(p0 >> 32) ^ ctr[3] ^ key[1],
                std::uint32_t(p0),
            };
            ctr = next;
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }
};

// Stream tags keep unrelated uses of the same seed statistically disjoint.
enum class StreamTag : std::uint32_t {
    kEdgeCoin = 0x01,
    kFieldNoise = 0x02,
    kPairPick = 0x03,
    kOrdering = 0x04,
    kGame = 0x05,
    kOracle = 0x06,
    kTest = 0x7F,
};

// One addressable substream: (seed; tag, a, b). Each Philox block yields two
// uniform doubles.
class CounterStream {
  public:
    CounterStream(std::uint64_t seed, StreamTag tag, std::uint64_t a, std::uint64_t b)
        : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)},
          base_{0u,
                std::uint32_t(a) ^ (std::uint32_t(b >> 32) << 16),
                std::uint32_t(b),
                (std::uint32_t(tag) << 24) ^ std::uint32_t(a >> 32)} {}

    std::uint64_t next_u64() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        auto ctr = base_;
        ctr[0] = block_index_++;
        const auto out = Philox4x32::block(ctr, key_);
        spare_ = (std::uint64_t(out[2]) << 32) | out[3];
        have_spare_ = true;
        return (std::uint64_t(out[0]) << 32) | out[1];
    }

    // Uniform on [0, 1) with 53 random bits.
    double next_double() {
        return double(next_u64() >> 11) * 0x1.0p-53;
    }

  private:
    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> base_;
    std::uint32_t block_index_ = 0;
    std::uint64_t spare_ = 0;
    bool have_spare_ = false;
};

// Stateless single draw, used for per-pair coins.
inline double uniform01_at(std::uint64_t seed, StreamTag tag, std::uint64_t a, std::uint64_t b) {
    return CounterStream(seed, tag, a, b).next_double();
}

}  // namespace graphmix
