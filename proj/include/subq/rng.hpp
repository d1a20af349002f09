#pragma once

// Counter-based random streams. A stream is addressed by (master seed,
// stream index); draws never depend on how streams are scheduled across
// threads.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace subq {

/// Philox4x32-10 (Salmon et al., SC'11). The 64-bit key is the master seed;
/// the upper half of the 128-bit counter carries the stream index and the
/// lower half counts blocks within the stream.
class Philox4x32 {
public:
    using result_type = std::uint32_t;
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    Philox4x32(std::uint64_t seed, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          counter_{0, 0, static_cast<std::uint32_t>(stream),
                   static_cast<std::uint32_t>(stream >> 32)} {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        if (index_ == 4) {
            buffer_ = generate(counter_, key_);
            if (++counter_[0] == 0) ++counter_[1];
            index_ = 0;
        }
        return buffer_[index_++];
    }

    std::uint64_t next_u64() {
        const std::uint64_t lo = (*this)();
        const std::uint64_t hi = (*this)();
        return (hi << 32) | lo;
    }

    /// Uniform on (0, 1], 53 bits.
    double uniform_open0() { return (double((next_u64() >> 11) + 1)) * 0x1.0p-53; }
    /// Uniform on [0, 1), 53 bits.
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    /// Ten rounds of the Philox bijection applied to one counter block.
    static Block generate(Block ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            const std::uint64_t p0 = std::uint64_t(kMul0) * ctr[0];
            const std::uint64_t p1 = std::uint64_t(kMul1) * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
                   static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
                   static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

    Key key_;
    Block counter_;
    Block buffer_{};
    int index_{4};
};

/// Standard normal draws from one Philox stream (Box-Muller, pairs cached).
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t stream) : engine_(seed, stream) {}

    double operator()() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double radius = std::sqrt(-2.0 * std::log(engine_.uniform_open0()));
        const double angle = 2.0 * std::numbers::pi * engine_.uniform();
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    Philox4x32 engine_;
    double spare_{0};
    bool has_spare_{false};
};

/// SplitMix64 finaliser applied to (master, tag): independent sub-seeds for
/// the separate experiments of one run.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (tag + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace subq
