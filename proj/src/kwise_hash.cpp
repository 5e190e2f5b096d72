#include "sketchbench/kwise_hash.hpp"

#include <string>

#include "sketchbench/errors.hpp"

namespace sketchbench {
namespace {

using u128 = unsigned __int128;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) noexcept {
    if (p == kMersenne61) {
        const u128 prod = static_cast<u128>(a) * b;
        std::uint64_t r = (static_cast<std::uint64_t>(prod) & kMersenne61) +
                          static_cast<std::uint64_t>(prod >> 61);
        if (r >= kMersenne61) r -= kMersenne61;
        return r;
    }
    return static_cast<std::uint64_t>((static_cast<u128>(a) * b) % p);
}

std::uint64_t addmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) noexcept {
    const u128 s = static_cast<u128>(a) + b;
    return static_cast<std::uint64_t>(s >= p ? s - p : s);
}

std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t p) noexcept {
    std::uint64_t result = 1 % p;
    base %= p;
    while (exp) {
        if (exp & 1) result = mulmod(result, base, p);
        base = mulmod(base, base, p);
        exp >>= 1;
    }
    return result;
}

}  // namespace

bool is_prime(std::uint64_t n) noexcept {
    if (n < 2) return false;
    for (std::uint64_t q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % q == 0) return n == q;
    }
    std::uint64_t d = n - 1;
    int r = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++r;
    }
    for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        std::uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < r; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

KwiseHash::KwiseHash(std::vector<std::uint64_t> coefficients, std::uint64_t range, std::uint64_t prime)
    : coefficients_(std::move(coefficients)), range_(range), prime_(prime) {
    if (coefficients_.empty()) throw ParameterError("KwiseHash: gamma must be >= 1");
    if (range_ == 0) throw ParameterError("KwiseHash: range must be >= 1");
    if (!is_prime(prime_)) throw ParameterError("KwiseHash: modulus " + std::to_string(prime_) + " is not prime");
    for (auto c : coefficients_) {
        if (c >= prime_) throw ParameterError("KwiseHash: coefficient outside [0, p)");
    }
}

std::uint64_t KwiseHash::field_value(std::uint64_t x) const {
    if (x >= prime_) {
        throw DomainError("KwiseHash: key " + std::to_string(x) + " >= field prime " + std::to_string(prime_));
    }
    // Horner from the leading coefficient.
    std::uint64_t acc = 0;
    for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) {
        acc = addmod(mulmod(acc, x, prime_), *it, prime_);
    }
    return acc;
}

KwiseHash hash_family_new(std::uint64_t gamma, std::uint64_t range, PrngState& rng, std::uint64_t prime) {
    if (gamma == 0) throw ParameterError("hash_family_new: gamma must be >= 1");
    if (range == 0) throw ParameterError("hash_family_new: range must be >= 1");
    std::vector<std::uint64_t> coefficients(gamma);
    for (auto& c : coefficients) c = rng.next_below(prime);
    return KwiseHash(std::move(coefficients), range, prime);
}

}  // namespace sketchbench
