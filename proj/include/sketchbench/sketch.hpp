#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sketchbench/graph.hpp"
#include "sketchbench/matrix.hpp"
#include "sketchbench/random.hpp"

namespace sketchbench {

/// Randomness used for a graph sketch's row and sign assignment.
struct Independence {
    /// 0 means fully random (independent PRNG draws); otherwise the degree of the
    /// polynomial hash families (gamma-wise independence).
    std::uint64_t gamma = 0;

    static constexpr Independence full() noexcept { return {0}; }
    static constexpr Independence gamma_wise(std::uint64_t g) noexcept { return {g}; }
    bool is_full() const noexcept { return gamma == 0; }
};

/// Sparse sketch with exactly s nonzeros of value +-1/sqrt(s) per column; the
/// adjacency matrix of a left-regular bipartite graph with signed edges.
class GraphSketch {
public:
    /// Explicit construction from flattened per-column slots: column j owns
    /// rows[j*s .. j*s+s) and signs[j*s .. j*s+s). Throws ParameterError unless every
    /// row id is in [0, m), rows within a column are distinct and signs are +-1.
    GraphSketch(Eigen::Index m, Eigen::Index s, std::vector<std::uint32_t> rows, std::vector<std::int8_t> signs,
                Independence independence = Independence::full(), RowMode row_mode = RowMode::block);

    /// n = m, s = 1, column j -> row j with sign +1.
    static GraphSketch identity(Eigen::Index n);

    Eigen::Index rows() const noexcept { return m_; }
    Eigen::Index cols() const noexcept { return n_; }
    Eigen::Index degree() const noexcept { return s_; }
    Eigen::Index nonzeros() const noexcept { return n_ * s_; }
    double scale() const noexcept { return scale_; }
    Independence independence() const noexcept { return independence_; }
    RowMode row_mode() const noexcept { return row_mode_; }

    std::span<const std::uint32_t> rows_of(Eigen::Index column) const {
        return {rows_.data() + column * s_, static_cast<std::size_t>(s_)};
    }
    std::span<const std::int8_t> signs_of(Eigen::Index column) const {
        return {signs_.data() + column * s_, static_cast<std::size_t>(s_)};
    }

    /// Stored value sign * (1/sqrt(s)) of slot i in column j.
    double value(Eigen::Index column, Eigen::Index slot) const noexcept {
        return signs_[static_cast<std::size_t>(column * s_ + slot)] * scale_;
    }

private:
    Eigen::Index m_;
    Eigen::Index n_;
    Eigen::Index s_;
    double scale_;
    std::vector<std::uint32_t> rows_;
    std::vector<std::int8_t> signs_;
    Independence independence_;
    RowMode row_mode_;
};

/// Dense m x n sketch. gaussian_sketch_new fills it with N(0, 1/m) entries; explicit
/// entries are accepted for fixtures such as the zero operator.
class GaussianSketch {
public:
    explicit GaussianSketch(DenseMatrix entries) : entries_(std::move(entries)) {}

    Eigen::Index rows() const noexcept { return entries_.rows(); }
    Eigen::Index cols() const noexcept { return entries_.cols(); }
    const DenseMatrix& entries() const noexcept { return entries_; }

private:
    DenseMatrix entries_;
};

/// Recipe that rebuilds an operator bit-exactly: method label plus the RNG stream.
struct Provenance {
    std::string method;  // "graph", "countsketch", "gaussian" or "explicit"
    Eigen::Index n = 0;
    Eigen::Index m = 0;  // effective row count
    Eigen::Index s = 0;  // 0 for dense operators
    std::uint64_t gamma = 0;
    RowMode row_mode = RowMode::block;
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;

    /// Single-line record, e.g. "method=graph n=1000 m=110 s=2 gamma=full rows=block seed=1 stream=99".
    std::string to_record() const;
};

struct SketchOperator {
    std::variant<GraphSketch, GaussianSketch> op;
    Provenance provenance;

    Eigen::Index rows() const;
    Eigen::Index cols() const;
    bool is_graph() const noexcept { return std::holds_alternative<GraphSketch>(op); }
    const GraphSketch& graph() const { return std::get<GraphSketch>(op); }
};

/// Block construction (RowMode::block): slot i of column j gets row i*(m/s) + h_i(j)
/// with h_i uniform on [0, m/s); the sign of each slot is an independent +-1. Row and
/// sign randomness come from the separate streams prng_split(rng, 1) and
/// prng_split(rng, 2). With gamma-wise independence, h_i and the sign functions are
/// independent members of the polynomial hash family. RowMode::subset draws a
/// uniform s-subset of [0, m) per column and does not need s | m.
/// Throws ParameterError if s < 1, s > m, n < 1, or (block mode) s does not divide m.
GraphSketch graph_sketch_new(Eigen::Index n, Eigen::Index m, Eigen::Index s, const PrngState& rng,
                             Independence independence = Independence::full(), RowMode row_mode = RowMode::block);

/// Degree-1 graph sketch: one +-1 per column.
GraphSketch countsketch_new(Eigen::Index n, Eigen::Index m, const PrngState& rng);

/// m x n with i.i.d. N(0, 1/m) entries, drawn column by column.
GaussianSketch gaussian_sketch_new(Eigen::Index n, Eigen::Index m, const PrngState& rng);

struct ExpanderParams {
    Eigen::Index s;
    Eigen::Index m;
};

/// s = ceil(c_s L / eps), m = ceil(c_m k L / eps^2) rounded up to a multiple of s,
/// where L = max(1, ln(k / (delta eps))).
ExpanderParams expander_sketch_params(Eigen::Index k, double eps, double delta, double c_s = 1.0,
                                      double c_m = 1.0);

/// Smallest multiple of s that is >= m.
Eigen::Index round_up_to_multiple(Eigen::Index m, Eigen::Index s);

/// Exact S * A. Graph sketches scatter every entry of A into its s output rows
/// (at most 2 s nnz(A) flops) in a fixed order, so results are reproducible.
/// Throws ShapeError when S.cols() != A.rows().
DenseMatrix sketch_apply(const SketchOperator& s, const Eigen::Ref<const DenseMatrix>& a);
DenseMatrix sketch_apply(const SketchOperator& s, const SparseMatrixCSR& a);
DenseMatrix sketch_apply(const GraphSketch& s, const Eigen::Ref<const DenseMatrix>& a);
DenseMatrix sketch_apply(const GraphSketch& s, const SparseMatrixCSR& a);

DenseMatrix sketch_densify(const SketchOperator& s);
DenseMatrix sketch_densify(const GraphSketch& s);

/// Left vertices are columns, right vertices rows, edges the nonzero positions.
BipartiteGraph sketch_to_graph(const GraphSketch& s);

/// Wraps a graph or Gaussian sketch with provenance taken from `rng`.
SketchOperator make_operator(GraphSketch s, const PrngState& rng);
SketchOperator make_operator(GaussianSketch s, const PrngState& rng);

/// Operator with provenance method "explicit" (not reconstructible); for fixtures.
SketchOperator make_explicit_operator(GraphSketch s);
SketchOperator make_explicit_operator(GaussianSketch s);

/// Rebuilds the operator a provenance record describes. Throws ParameterError for
/// "explicit" provenance.
SketchOperator rebuild_operator(const Provenance& p);

/// A sketch family as written in configs: "gaussian", "countsketch", "magical"
/// (graph with s = 2) or "graph:s=<s>[:gamma=<g>][:rows=block|subset]".
struct MethodSpec {
    enum class Kind { graph, gaussian };

    Kind kind = Kind::graph;
    Eigen::Index s = 1;
    Independence independence = Independence::full();
    RowMode row_mode = RowMode::block;

    /// Throws ParameterError for unknown methods or malformed options.
    static MethodSpec parse(std::string_view text);

    /// Canonical label, stable across runs; parse(label()) round-trips.
    std::string label() const;

    /// Row count actually used for a requested m (block graphs round up to s | m).
    Eigen::Index effective_m(Eigen::Index m_requested) const;

    SketchOperator build(Eigen::Index n, Eigen::Index m_requested, const PrngState& rng) const;
};

}  // namespace sketchbench
