#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sketchbench/random.hpp"

namespace sketchbench {

using VertexId = std::uint32_t;

/// How the s right neighbours of each left vertex are drawn.
enum class RowMode {
    /// One neighbour per contiguous block of m/s right vertices (requires s | m).
    block,
    /// A uniform s-subset of all m right vertices (partial Fisher-Yates).
    subset,
};

/// Left-regular bipartite graph G = (L, R; E) with |L| = n, |R| = m and left degree s.
class BipartiteGraph {
public:
    /// `adjacency[v]` lists the right neighbours of left vertex v. Lists are sorted on
    /// construction; throws ParameterError on out-of-range ids, duplicates, or a list
    /// whose length differs from `degree`.
    BipartiteGraph(std::size_t right_count, std::size_t degree, std::vector<std::vector<VertexId>> adjacency);

    /// Perfect matching i -> i on n + n vertices.
    static BipartiteGraph identity(std::size_t n);

    /// Every left vertex adjacent to all m right vertices (degree m).
    static BipartiteGraph complete(std::size_t n, std::size_t m);

    std::size_t left_count() const noexcept { return adjacency_.size(); }
    std::size_t right_count() const noexcept { return right_count_; }
    std::size_t degree() const noexcept { return degree_; }
    std::size_t edge_count() const noexcept { return adjacency_.size() * degree_; }
    std::span<const VertexId> neighbors(VertexId left) const { return adjacency_.at(left); }

private:
    std::size_t right_count_;
    std::size_t degree_;
    std::vector<std::vector<VertexId>> adjacency_;
};

/// Gamma(C): sorted union of the neighbour lists of the left vertices in C.
std::vector<VertexId> neighborhood(const BipartiteGraph& g, std::span<const VertexId> subset);

struct ExpansionResult {
    bool holds = true;
    std::optional<std::vector<VertexId>> witness;  // first C with |Gamma(C)| <= (1 - eps) s |C|
};

inline constexpr std::uint64_t kExpansionBudget = 10'000'000;

/// Exhaustive (k, 1 - eps)-expansion check over every nonempty C with |C| <= k, in
/// order of increasing size then lexicographic order. Throws GuardError when the
/// number of subsets exceeds `budget`.
ExpansionResult verify_expansion(const BipartiteGraph& g, std::size_t k, double eps,
                                 std::uint64_t budget = kExpansionBudget);

/// True iff some matching saturates every vertex of C (Hopcroft-Karp on the
/// subgraph induced by C and Gamma(C)).
bool max_matching_covers(const BipartiteGraph& g, std::span<const VertexId> subset);

/// Uniform k-subset of [0, n) without replacement (Floyd's algorithm), sorted.
std::vector<VertexId> sample_subset(std::size_t n, std::size_t k, PrngState& rng);

struct Independence;

/// Fraction of `trials` draws (fresh degree-s graph sketch plus a uniform k-subset C)
/// where no matching saturates C. Trial t uses prng_split(rng, t).
double estimate_magical_delta(std::size_t n, std::size_t m, std::size_t s, std::size_t k, std::size_t trials,
                              const PrngState& rng, RowMode row_mode = RowMode::block);
double estimate_magical_delta(std::size_t n, std::size_t m, std::size_t s, std::size_t k, std::size_t trials,
                              const PrngState& rng, RowMode row_mode, Independence independence);

}  // namespace sketchbench
