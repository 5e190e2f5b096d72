#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sketchbench/random.hpp"

namespace sketchbench {

/// Mersenne prime 2^61 - 1, the default field modulus.
inline constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;

/// Random polynomial of degree gamma - 1 over GF(p), reduced mod `range` on output.
///
/// Drawing the gamma coefficients uniformly makes the field values at any gamma
/// distinct points jointly uniform. With p = 2^61 - 1 the final mod-range step has
/// bias at most range / p, which is accepted without rejection.
class KwiseHash {
public:
    /// Explicit family member. coefficients[i] multiplies x^i. Throws ParameterError
    /// if the coefficient list is empty, range is 0, p < 2, or a coefficient is >= p.
    KwiseHash(std::vector<std::uint64_t> coefficients, std::uint64_t range,
              std::uint64_t prime = kMersenne61);

    std::uint64_t gamma() const noexcept { return coefficients_.size(); }
    std::uint64_t prime() const noexcept { return prime_; }
    std::uint64_t range() const noexcept { return range_; }
    std::span<const std::uint64_t> coefficients() const noexcept { return coefficients_; }

    /// Polynomial value in GF(p) before range reduction. Throws DomainError if x >= p.
    std::uint64_t field_value(std::uint64_t x) const;

    std::uint64_t operator()(std::uint64_t x) const { return field_value(x) % range_; }

private:
    std::vector<std::uint64_t> coefficients_;
    std::uint64_t range_;
    std::uint64_t prime_;
};

/// Draws a member of the gamma-wise independent family. Throws ParameterError for
/// gamma == 0 or range == 0.
KwiseHash hash_family_new(std::uint64_t gamma, std::uint64_t range, PrngState& rng,
                          std::uint64_t prime = kMersenne61);

inline std::uint64_t hash_eval(const KwiseHash& h, std::uint64_t x) { return h(x); }

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
bool is_prime(std::uint64_t n) noexcept;

}  // namespace sketchbench
