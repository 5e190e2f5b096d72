#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "sketchbench/errors.hpp"
#include "sketchbench/graph.hpp"
#include "sketchbench/sketch.hpp"

using namespace sketchbench;

namespace {

BipartiteGraph random_graph(std::size_t n, std::size_t m, std::size_t s, PrngState& rng) {
    std::vector<std::vector<VertexId>> adj(n);
    for (auto& list : adj) list = sample_subset(m, s, rng);
    return BipartiteGraph(m, s, std::move(adj));
}

// Independent set-union check of the expansion property.
bool brute_force_expansion(const BipartiteGraph& g, std::size_t k, double eps) {
    const std::size_t n = g.left_count();
    std::vector<VertexId> subset;
    bool ok = true;
    auto recurse = [&](auto&& self, VertexId start) -> void {
        if (!ok) return;
        if (!subset.empty()) {
            std::set<VertexId> hit;
            for (VertexId v : subset)
                for (VertexId r : g.neighbors(v)) hit.insert(r);
            if (!(static_cast<double>(hit.size()) >
                  (1.0 - eps) * static_cast<double>(g.degree()) * static_cast<double>(subset.size()))) {
                ok = false;
                return;
            }
        }
        if (subset.size() == k) return;
        for (VertexId v = start; v < n; ++v) {
            subset.push_back(v);
            self(self, v + 1);
            subset.pop_back();
        }
    };
    recurse(recurse, 0);
    return ok;
}

// Hall's condition over every nonempty subset of c.
bool brute_force_hall(const BipartiteGraph& g, const std::vector<VertexId>& c) {
    for (std::uint32_t mask = 1; mask < (1u << c.size()); ++mask) {
        std::set<VertexId> hit;
        for (std::size_t i = 0; i < c.size(); ++i)
            if (mask & (1u << i))
                for (VertexId r : g.neighbors(c[i])) hit.insert(r);
        if (hit.size() < static_cast<std::size_t>(std::popcount(mask))) return false;
    }
    return true;
}

}  // namespace

TEST(Neighborhood, Basics) {
    const auto id = BipartiteGraph::identity(6);
    EXPECT_TRUE(neighborhood(id, {}).empty());
    const std::vector<VertexId> c{1, 4, 5};
    EXPECT_EQ(neighborhood(id, c), c);

    const BipartiteGraph shared(5, 2, {{1, 3}, {3, 1}, {0, 4}});
    const std::vector<VertexId> pair{0, 1};
    EXPECT_EQ(neighborhood(shared, pair).size(), 2u);
}

TEST(Neighborhood, Monotone) {
    PrngState rng = prng_new(1);
    for (int t = 0; t < 50; ++t) {
        const auto g = random_graph(20, 15, 3, rng);
        auto big = sample_subset(20, 8, rng);
        std::vector<VertexId> small(big.begin(), big.begin() + 4);
        const auto gs = neighborhood(g, small);
        const auto gb = neighborhood(g, big);
        EXPECT_TRUE(std::includes(gb.begin(), gb.end(), gs.begin(), gs.end()));
    }
}

TEST(BipartiteGraph, RejectsInvalidAdjacency) {
    EXPECT_THROW(BipartiteGraph(3, 2, {{0, 0}}), ParameterError);
    EXPECT_THROW(BipartiteGraph(3, 2, {{0}}), ParameterError);
    EXPECT_THROW(BipartiteGraph(3, 1, {{3}}), ParameterError);
}

TEST(VerifyExpansion, IdentityHolds) {
    const auto id = BipartiteGraph::identity(10);
    for (std::size_t k = 1; k <= 4; ++k)
        for (double eps : {0.01, 0.5, 0.99}) EXPECT_TRUE(verify_expansion(id, k, eps).holds);
}

TEST(VerifyExpansion, CompleteGraphFailsOnPairs) {
    const auto g = BipartiteGraph::complete(5, 6);
    const auto res = verify_expansion(g, 2, 0.25);
    EXPECT_FALSE(res.holds);
    ASSERT_TRUE(res.witness.has_value());
    EXPECT_EQ(res.witness->size(), 2u);
    EXPECT_TRUE(verify_expansion(g, 2, 0.6).holds);
}

TEST(VerifyExpansion, ParameterAndBudgetGuards) {
    const auto id = BipartiteGraph::identity(40);
    EXPECT_THROW(verify_expansion(id, 2, 0.0), ParameterError);
    EXPECT_THROW(verify_expansion(id, 2, 1.0), ParameterError);
    EXPECT_THROW(verify_expansion(id, 20, 0.5), GuardError);
    EXPECT_THROW(verify_expansion(id, 3, 0.5, 100), GuardError);
}

TEST(VerifyExpansion, MatchesBruteForce) {
    PrngState rng = prng_new(2);
    int failures_seen = 0;
    for (int t = 0; t < 60; ++t) {
        const auto g = random_graph(30, 60, 4, rng);
        const auto res = verify_expansion(g, 3, 0.5);
        EXPECT_EQ(res.holds, brute_force_expansion(g, 3, 0.5));
        failures_seen += !res.holds;
    }
    // Tighter graphs exercise the failing branch and its witness.
    for (int t = 0; t < 60; ++t) {
        const auto g = random_graph(12, 8, 3, rng);
        const auto res = verify_expansion(g, 3, 0.3);
        EXPECT_EQ(res.holds, brute_force_expansion(g, 3, 0.3));
        if (!res.holds) {
            ++failures_seen;
            ASSERT_TRUE(res.witness.has_value());
            const auto hit = neighborhood(g, *res.witness);
            EXPECT_LE(static_cast<double>(hit.size()), 0.7 * 3 * static_cast<double>(res.witness->size()));
        }
    }
    EXPECT_GT(failures_seen, 0);
}

TEST(MaxMatching, Basics) {
    const auto id = BipartiteGraph::identity(7);
    const std::vector<VertexId> all{0, 1, 2, 3, 4, 5, 6};
    EXPECT_TRUE(max_matching_covers(id, all));
    const BipartiteGraph clash(3, 1, {{2}, {2}});
    const std::vector<VertexId> both{0, 1};
    EXPECT_FALSE(max_matching_covers(clash, both));
    EXPECT_TRUE(max_matching_covers(clash, std::vector<VertexId>{1}));
    EXPECT_TRUE(max_matching_covers(clash, std::vector<VertexId>{}));
}

TEST(MaxMatching, MatchesHallCondition) {
    PrngState rng = prng_new(3);
    int uncovered = 0;
    for (int t = 0; t < 200; ++t) {
        const auto n = 1 + rng.next_below(8);
        const auto m = 1 + rng.next_below(12);
        const auto s = 1 + rng.next_below(std::min<std::uint64_t>(3, m));
        const auto g = random_graph(n, m, s, rng);
        const auto c = sample_subset(n, 1 + rng.next_below(n), rng);
        const bool hall = brute_force_hall(g, c);
        EXPECT_EQ(max_matching_covers(g, c), hall);
        uncovered += !hall;
    }
    EXPECT_GT(uncovered, 0);
}

TEST(MaxMatching, ExpansionImpliesMatching) {
    // With (1 - eps) s >= 1, expansion gives |Gamma(C')| > |C'| for every small C'.
    PrngState rng = prng_new(4);
    for (int t = 0; t < 100; ++t) {
        const auto g = random_graph(10, 12, 2, rng);
        if (!verify_expansion(g, 4, 0.5).holds) continue;
        for (int r = 0; r < 10; ++r) {
            const auto c = sample_subset(10, 1 + rng.next_below(4), rng);
            EXPECT_TRUE(max_matching_covers(g, c));
        }
    }
}

TEST(SampleSubset, UniformSortedDistinct) {
    PrngState rng = prng_new(5);
    std::vector<int> counts(10, 0);
    for (int t = 0; t < 20000; ++t) {
        const auto c = sample_subset(10, 3, rng);
        ASSERT_EQ(c.size(), 3u);
        ASSERT_TRUE(std::is_sorted(c.begin(), c.end()));
        ASSERT_EQ(std::adjacent_find(c.begin(), c.end()), c.end());
        for (auto v : c) ++counts[v];
    }
    for (int v : counts) EXPECT_NEAR(v, 6000, 300);
    EXPECT_THROW(sample_subset(3, 4, rng), ParameterError);
}

TEST(MagicalDelta, TrivialCases) {
    const auto rng = prng_new(6);
    EXPECT_EQ(estimate_magical_delta(1, 1, 1, 1, 50, rng), 0.0);
    EXPECT_EQ(estimate_magical_delta(2, 1, 1, 2, 50, rng), 1.0);
    EXPECT_THROW(estimate_magical_delta(5, 10, 2, 6, 10, rng), ParameterError);
    EXPECT_THROW(estimate_magical_delta(5, 10, 2, 2, 0, rng), ParameterError);
}

TEST(MagicalDelta, Deterministic) {
    const auto rng = prng_new(7);
    EXPECT_EQ(estimate_magical_delta(100, 20, 2, 8, 300, rng), estimate_magical_delta(100, 20, 2, 8, 300, rng));
}

TEST(MagicalDelta, NonIncreasingInM) {
    std::vector<double> at_m, at_2m;
    for (std::uint64_t rep = 0; rep < 20; ++rep) {
        const auto rng = prng_new(100 + rep);
        at_m.push_back(estimate_magical_delta(200, 20, 2, 8, 100, prng_split(rng, 0)));
        at_2m.push_back(estimate_magical_delta(200, 40, 2, 8, 100, prng_split(rng, 1)));
    }
    std::nth_element(at_m.begin(), at_m.begin() + 10, at_m.end());
    std::nth_element(at_2m.begin(), at_2m.begin() + 10, at_2m.end());
    EXPECT_LE(at_2m[10], at_m[10]);
    EXPECT_GT(at_m[10], 0.0);
}

TEST(MagicalDelta, HashedAndSubsetModesRun) {
    const auto rng = prng_new(8);
    const double hashed = estimate_magical_delta(300, 40, 2, 6, 200, rng, RowMode::block, Independence::gamma_wise(4));
    const double subset = estimate_magical_delta(300, 40, 2, 6, 200, rng, RowMode::subset);
    EXPECT_GE(hashed, 0.0);
    EXPECT_LE(hashed, 0.2);
    EXPECT_LE(subset, 0.2);
}
