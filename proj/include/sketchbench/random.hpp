#pragma once

#include <cstdint>
#include <string_view>

namespace sketchbench {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014). Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

/// Counter-based SplitMix64 stream.
///
/// Output i of stream (seed, stream_id) is mix64(key + (i + 1) * kGoldenGamma) with
/// key = mix64(seed ^ mix64(stream_id + kGoldenGamma)). Every value is a pure function
/// of (seed, stream_id, i), so sequences are identical on every platform and children
/// created by split() do not depend on how far the parent has advanced.
class PrngState {
public:
    explicit PrngState(std::uint64_t seed, std::uint64_t stream_id = 0) noexcept
        : seed_(seed), stream_id_(stream_id), key_(mix64(seed ^ mix64(stream_id + kGoldenGamma))) {}

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }
    std::uint64_t counter() const noexcept { return counter_; }

    std::uint64_t next_u64() noexcept {
        ++counter_;
        return mix64(key_ + counter_ * kGoldenGamma);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Exactly uniform integer in [0, bound). Lemire's multiply-shift with rejection.
    std::uint64_t next_below(std::uint64_t bound);

    /// Standard normal via Box-Muller (cosine branch, two uniforms per draw).
    double next_normal() noexcept;

    /// Uniform sign, taken from the top bit of one draw.
    int next_sign() noexcept { return (next_u64() >> 63) ? -1 : 1; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

PrngState prng_new(std::uint64_t seed) noexcept;

/// Child stream derived from the parent's (seed, stream_id) and `stream_id` only.
PrngState prng_split(const PrngState& parent, std::uint64_t stream_id) noexcept;

/// Stable 64-bit FNV-1a digest, used to turn labels into stream ids.
std::uint64_t stable_hash(std::string_view text) noexcept;

/// Order-sensitive combination of two 64-bit words.
constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) noexcept {
    return mix64(a ^ (b + kGoldenGamma + (a << 6) + (a >> 2)));
}

}  // namespace sketchbench
