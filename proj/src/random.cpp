#include "sketchbench/random.hpp"

#include <cmath>
#include <numbers>

namespace sketchbench {

std::uint64_t PrngState::next_below(std::uint64_t bound) {
    // bound == 0 would be meaningless; callers validate, we return 0.
    if (bound == 0) return 0;
    std::uint64_t x = next_u64();
    auto product = static_cast<unsigned __int128>(x) * bound;
    auto low = static_cast<std::uint64_t>(product);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            x = next_u64();
            product = static_cast<unsigned __int128>(x) * bound;
            low = static_cast<std::uint64_t>(product);
        }
    }
    return static_cast<std::uint64_t>(product >> 64);
}

double PrngState::next_normal() noexcept {
    // 1 - u lies in (0, 1], so the log is finite.
    const double u1 = 1.0 - next_unit();
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

PrngState prng_new(std::uint64_t seed) noexcept { return PrngState(seed, 0); }

PrngState prng_split(const PrngState& parent, std::uint64_t stream_id) noexcept {
    return PrngState(parent.seed(), hash_combine(parent.stream_id(), stream_id));
}

std::uint64_t stable_hash(std::string_view text) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace sketchbench
