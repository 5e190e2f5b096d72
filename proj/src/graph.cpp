#include "sketchbench/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include "sketchbench/errors.hpp"
#include "sketchbench/sketch.hpp"

namespace sketchbench {

BipartiteGraph::BipartiteGraph(std::size_t right_count, std::size_t degree,
                               std::vector<std::vector<VertexId>> adjacency)
    : right_count_(right_count), degree_(degree), adjacency_(std::move(adjacency)) {
    for (std::size_t v = 0; v < adjacency_.size(); ++v) {
        auto& list = adjacency_[v];
        if (list.size() != degree_) {
            throw ParameterError("BipartiteGraph: left vertex " + std::to_string(v) + " has " +
                                 std::to_string(list.size()) + " neighbours, expected " + std::to_string(degree_));
        }
        std::sort(list.begin(), list.end());
        if (std::adjacent_find(list.begin(), list.end()) != list.end()) {
            throw ParameterError("BipartiteGraph: duplicate neighbour of left vertex " + std::to_string(v));
        }
        if (!list.empty() && list.back() >= right_count_) {
            throw ParameterError("BipartiteGraph: neighbour id out of range for left vertex " + std::to_string(v));
        }
    }
}

BipartiteGraph BipartiteGraph::identity(std::size_t n) {
    std::vector<std::vector<VertexId>> adj(n);
    for (std::size_t i = 0; i < n; ++i) adj[i] = {static_cast<VertexId>(i)};
    return BipartiteGraph(n, 1, std::move(adj));
}

BipartiteGraph BipartiteGraph::complete(std::size_t n, std::size_t m) {
    std::vector<VertexId> all(m);
    for (std::size_t r = 0; r < m; ++r) all[r] = static_cast<VertexId>(r);
    return BipartiteGraph(m, m, std::vector<std::vector<VertexId>>(n, all));
}

namespace {

void check_subset(const BipartiteGraph& g, std::span<const VertexId> subset) {
    for (auto v : subset) {
        if (v >= g.left_count()) {
            throw ParameterError("left vertex id " + std::to_string(v) + " out of range [0, " +
                                 std::to_string(g.left_count()) + ")");
        }
    }
}

std::vector<VertexId> unique_sorted(std::span<const VertexId> subset) {
    std::vector<VertexId> c(subset.begin(), subset.end());
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    return c;
}

// Saturating sum of binomial(n, j) for j = 1..k.
std::uint64_t subset_count(std::size_t n, std::size_t k, std::uint64_t cap) {
    std::uint64_t total = 0;
    long double term = 1.0L;
    for (std::size_t j = 1; j <= k; ++j) {
        term = term * static_cast<long double>(n - j + 1) / static_cast<long double>(j);
        total += static_cast<std::uint64_t>(std::min<long double>(std::round(term), static_cast<long double>(cap) + 1));
        if (total > cap) return cap + 1;
    }
    return total;
}

}  // namespace

std::vector<VertexId> neighborhood(const BipartiteGraph& g, std::span<const VertexId> subset) {
    check_subset(g, subset);
    std::vector<VertexId> out;
    out.reserve(subset.size() * g.degree());
    for (auto v : subset) {
        const auto nb = g.neighbors(v);
        out.insert(out.end(), nb.begin(), nb.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

ExpansionResult verify_expansion(const BipartiteGraph& g, std::size_t k, double eps, std::uint64_t budget) {
    if (!(eps > 0.0 && eps < 1.0)) throw ParameterError("verify_expansion: eps must lie in (0, 1)");
    const std::size_t n = g.left_count();
    k = std::min(k, n);
    const std::uint64_t needed = subset_count(n, k, budget);
    if (needed > budget) {
        throw GuardError("verify_expansion: checking all subsets of size <= " + std::to_string(k) + " of " +
                         std::to_string(n) + " left vertices exceeds the budget of " + std::to_string(budget));
    }

    // Multiplicity counters over right vertices, updated incrementally as the
    // combination advances.
    std::vector<std::uint32_t> hits(g.right_count(), 0);
    std::size_t covered = 0;
    auto add = [&](VertexId v) {
        for (auto r : g.neighbors(v))
            if (hits[r]++ == 0) ++covered;
    };
    auto remove = [&](VertexId v) {
        for (auto r : g.neighbors(v))
            if (--hits[r] == 0) --covered;
    };

    const double s = static_cast<double>(g.degree());
    for (std::size_t size = 1; size <= k; ++size) {
        std::vector<VertexId> combo(size);
        for (std::size_t i = 0; i < size; ++i) {
            combo[i] = static_cast<VertexId>(i);
            add(combo[i]);
        }
        const double bound = (1.0 - eps) * s * static_cast<double>(size);
        while (true) {
            if (!(static_cast<double>(covered) > bound)) {
                for (auto v : combo) remove(v);
                return {false, combo};
            }
            // Advance to the next combination in lexicographic order.
            std::size_t i = size;
            while (i > 0 && combo[i - 1] == n - size + i - 1) --i;
            if (i == 0) break;
            for (std::size_t t = i - 1; t < size; ++t) remove(combo[t]);
            ++combo[i - 1];
            for (std::size_t t = i; t < size; ++t) combo[t] = combo[t - 1] + 1;
            for (std::size_t t = i - 1; t < size; ++t) add(combo[t]);
        }
        for (auto v : combo) remove(v);
    }
    return {true, std::nullopt};
}

bool max_matching_covers(const BipartiteGraph& g, std::span<const VertexId> subset) {
    check_subset(g, subset);
    const auto left = unique_sorted(subset);
    const std::size_t nl = left.size();
    if (nl == 0) return true;

    // Compact the induced subgraph: right ids of Gamma(C) renumbered 0..nr-1.
    const auto right = neighborhood(g, left);
    if (right.size() < nl) return false;
    std::vector<std::vector<std::uint32_t>> adj(nl);
    for (std::size_t i = 0; i < nl; ++i) {
        for (auto r : g.neighbors(left[i])) {
            adj[i].push_back(static_cast<std::uint32_t>(std::lower_bound(right.begin(), right.end(), r) - right.begin()));
        }
    }

    constexpr std::uint32_t kFree = std::numeric_limits<std::uint32_t>::max();
    constexpr std::uint32_t kInf = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> match_left(nl, kFree), match_right(right.size(), kFree), dist(nl);

    auto bfs = [&]() {
        std::queue<std::uint32_t> q;
        bool found = false;
        for (std::uint32_t u = 0; u < nl; ++u) {
            if (match_left[u] == kFree) {
                dist[u] = 0;
                q.push(u);
            } else {
                dist[u] = kInf;
            }
        }
        while (!q.empty()) {
            const auto u = q.front();
            q.pop();
            for (auto r : adj[u]) {
                const auto w = match_right[r];
                if (w == kFree) {
                    found = true;
                } else if (dist[w] == kInf) {
                    dist[w] = dist[u] + 1;
                    q.push(w);
                }
            }
        }
        return found;
    };

    // Recursion depth is bounded by |C|.
    auto dfs = [&](auto&& self, std::uint32_t u) -> bool {
        for (auto r : adj[u]) {
            const auto w = match_right[r];
            if (w == kFree || (dist[w] == dist[u] + 1 && self(self, w))) {
                match_left[u] = r;
                match_right[r] = u;
                return true;
            }
        }
        dist[u] = kInf;
        return false;
    };

    std::size_t matched = 0;
    while (bfs()) {
        for (std::uint32_t u = 0; u < nl; ++u)
            if (match_left[u] == kFree && dfs(dfs, u)) ++matched;
    }
    return matched == nl;
}

std::vector<VertexId> sample_subset(std::size_t n, std::size_t k, PrngState& rng) {
    if (k > n) throw ParameterError("sample_subset: k exceeds n");
    std::vector<VertexId> chosen;
    chosen.reserve(k);
    for (std::size_t j = n - k; j < n; ++j) {
        const auto t = static_cast<VertexId>(rng.next_below(j + 1));
        if (std::find(chosen.begin(), chosen.end(), t) == chosen.end()) {
            chosen.push_back(t);
        } else {
            chosen.push_back(static_cast<VertexId>(j));
        }
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

double estimate_magical_delta(std::size_t n, std::size_t m, std::size_t s, std::size_t k, std::size_t trials,
                              const PrngState& rng, RowMode row_mode) {
    return estimate_magical_delta(n, m, s, k, trials, rng, row_mode, Independence::full());
}

double estimate_magical_delta(std::size_t n, std::size_t m, std::size_t s, std::size_t k, std::size_t trials,
                              const PrngState& rng, RowMode row_mode, Independence independence) {
    if (trials < 1) throw ParameterError("estimate_magical_delta: trials must be >= 1");
    if (k > n) throw ParameterError("estimate_magical_delta: k exceeds n");
    std::size_t failures = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        const PrngState trial = prng_split(rng, t);
        PrngState graph_rng = prng_split(trial, 0);
        PrngState subset_rng = prng_split(trial, 1);
        const auto sketch = graph_sketch_new(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m),
                                             static_cast<Eigen::Index>(s), graph_rng, independence, row_mode);
        const auto graph = sketch_to_graph(sketch);
        const auto subset = sample_subset(n, k, subset_rng);
        if (!max_matching_covers(graph, subset)) ++failures;
    }
    return static_cast<double>(failures) / static_cast<double>(trials);
}

}  // namespace sketchbench
