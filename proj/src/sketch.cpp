#include "sketchbench/sketch.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "sketchbench/errors.hpp"
#include "sketchbench/kwise_hash.hpp"

namespace sketchbench {

GraphSketch::GraphSketch(Eigen::Index m, Eigen::Index s, std::vector<std::uint32_t> rows,
                         std::vector<std::int8_t> signs, Independence independence, RowMode row_mode)
    : m_(m),
      n_(s > 0 ? static_cast<Eigen::Index>(rows.size()) / s : 0),
      s_(s),
      scale_(s > 0 ? 1.0 / std::sqrt(static_cast<double>(s)) : 0.0),
      rows_(std::move(rows)),
      signs_(std::move(signs)),
      independence_(independence),
      row_mode_(row_mode) {
    if (s_ < 1 || s_ > m_) throw ParameterError("GraphSketch: need 1 <= s <= m");
    if (rows_.size() % static_cast<std::size_t>(s_) != 0 || signs_.size() != rows_.size()) {
        throw ParameterError("GraphSketch: rows and signs must hold s entries per column");
    }
    std::vector<std::uint32_t> column(static_cast<std::size_t>(s_));
    for (Eigen::Index j = 0; j < n_; ++j) {
        const auto r = rows_of(j);
        column.assign(r.begin(), r.end());
        std::sort(column.begin(), column.end());
        if (std::adjacent_find(column.begin(), column.end()) != column.end()) {
            throw ParameterError("GraphSketch: repeated row in column " + std::to_string(j));
        }
        if (column.back() >= m_) throw ParameterError("GraphSketch: row index out of range in column " + std::to_string(j));
        for (auto sg : signs_of(j)) {
            if (sg != 1 && sg != -1) throw ParameterError("GraphSketch: signs must be +-1");
        }
    }
}

GraphSketch GraphSketch::identity(Eigen::Index n) {
    std::vector<std::uint32_t> rows(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) rows[static_cast<std::size_t>(j)] = static_cast<std::uint32_t>(j);
    return GraphSketch(n, 1, std::move(rows), std::vector<std::int8_t>(static_cast<std::size_t>(n), 1));
}

Eigen::Index SketchOperator::rows() const {
    return std::visit([](const auto& s) { return s.rows(); }, op);
}

Eigen::Index SketchOperator::cols() const {
    return std::visit([](const auto& s) { return s.cols(); }, op);
}

std::string Provenance::to_record() const {
    std::ostringstream out;
    out << "method=" << method << " n=" << n << " m=" << m << " s=" << s << " gamma=";
    if (gamma == 0) {
        out << "full";
    } else {
        out << gamma;
    }
    out << " rows=" << (row_mode == RowMode::block ? "block" : "subset") << " seed=" << seed
        << " stream=" << stream_id;
    return out.str();
}

Eigen::Index round_up_to_multiple(Eigen::Index m, Eigen::Index s) {
    if (s < 1) throw ParameterError("round_up_to_multiple: s must be >= 1");
    return ((m + s - 1) / s) * s;
}

namespace {

// Partial Fisher-Yates over [0, m) recording only displaced positions.
// `pick(t)` must return a value in [0, m - t).
template <typename Pick>
void fisher_yates_prefix(Eigen::Index m, Eigen::Index s, Pick&& pick, std::uint32_t* out) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> swapped;  // position -> value
    auto value_at = [&](std::uint32_t pos) {
        for (const auto& [p, v] : swapped)
            if (p == pos) return v;
        return pos;
    };
    auto set_at = [&](std::uint32_t pos, std::uint32_t v) {
        for (auto& [p, old] : swapped)
            if (p == pos) {
                old = v;
                return;
            }
        swapped.emplace_back(pos, v);
    };
    for (Eigen::Index t = 0; t < s; ++t) {
        const auto pos = static_cast<std::uint32_t>(t);
        const auto r = static_cast<std::uint32_t>(t + pick(t));
        const auto vt = value_at(pos);
        const auto vr = value_at(r);
        set_at(pos, vr);
        set_at(r, vt);
        out[t] = vr;
    }
    (void)m;
}

}  // namespace

GraphSketch graph_sketch_new(Eigen::Index n, Eigen::Index m, Eigen::Index s, const PrngState& rng,
                             Independence independence, RowMode row_mode) {
    if (n < 1) throw ParameterError("graph_sketch_new: n must be >= 1");
    if (s < 1 || s > m) {
        throw ParameterError("graph_sketch_new: need 1 <= s <= m, got s=" + std::to_string(s) + " m=" + std::to_string(m));
    }
    if (row_mode == RowMode::block && m % s != 0) {
        throw ParameterError("graph_sketch_new: m=" + std::to_string(m) + " is not a multiple of s=" + std::to_string(s));
    }
    if (m > static_cast<Eigen::Index>(std::numeric_limits<std::uint32_t>::max())) {
        throw ParameterError("graph_sketch_new: m too large");
    }
    if (!independence.is_full() && static_cast<std::uint64_t>(n) >= kMersenne61) {
        throw ParameterError("graph_sketch_new: n exceeds the hash domain");
    }

    const auto total = static_cast<std::size_t>(n * s);
    std::vector<std::uint32_t> rows(total);
    std::vector<std::int8_t> signs(total);
    PrngState row_rng = prng_split(rng, 1);
    PrngState sign_rng = prng_split(rng, 2);
    const Eigen::Index block = m / s;

    if (independence.is_full()) {
        for (Eigen::Index j = 0; j < n; ++j) {
            auto* out = rows.data() + j * s;
            if (row_mode == RowMode::block) {
                for (Eigen::Index i = 0; i < s; ++i)
                    out[i] = static_cast<std::uint32_t>(i * block + static_cast<Eigen::Index>(row_rng.next_below(block)));
            } else {
                fisher_yates_prefix(m, s, [&](Eigen::Index t) { return row_rng.next_below(m - t); }, out);
            }
            for (Eigen::Index i = 0; i < s; ++i) signs[static_cast<std::size_t>(j * s + i)] = static_cast<std::int8_t>(sign_rng.next_sign());
        }
    } else {
        const auto gamma = independence.gamma;
        std::vector<KwiseHash> row_hash;
        std::vector<KwiseHash> sign_hash;
        for (Eigen::Index i = 0; i < s; ++i) {
            const auto range = row_mode == RowMode::block ? block : m - i;
            row_hash.push_back(hash_family_new(gamma, static_cast<std::uint64_t>(range), row_rng));
            sign_hash.push_back(hash_family_new(gamma, 2, sign_rng));
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            const auto key = static_cast<std::uint64_t>(j);
            auto* out = rows.data() + j * s;
            if (row_mode == RowMode::block) {
                for (Eigen::Index i = 0; i < s; ++i)
                    out[i] = static_cast<std::uint32_t>(i * block + static_cast<Eigen::Index>(row_hash[i](key)));
            } else {
                fisher_yates_prefix(m, s, [&](Eigen::Index t) { return row_hash[t](key); }, out);
            }
            for (Eigen::Index i = 0; i < s; ++i)
                signs[static_cast<std::size_t>(j * s + i)] = sign_hash[i](key) == 0 ? 1 : -1;
        }
    }
    return GraphSketch(m, s, std::move(rows), std::move(signs), independence, row_mode);
}

GraphSketch countsketch_new(Eigen::Index n, Eigen::Index m, const PrngState& rng) {
    return graph_sketch_new(n, m, 1, rng, Independence::full(), RowMode::block);
}

GaussianSketch gaussian_sketch_new(Eigen::Index n, Eigen::Index m, const PrngState& rng) {
    if (n < 1 || m < 1) throw ParameterError("gaussian_sketch_new: m and n must be >= 1");
    PrngState draw = prng_split(rng, 3);
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    DenseMatrix entries(m, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < m; ++i) entries(i, j) = scale * draw.next_normal();
    return GaussianSketch(std::move(entries));
}

ExpanderParams expander_sketch_params(Eigen::Index k, double eps, double delta, double c_s, double c_m) {
    if (k < 1) throw ParameterError("expander_sketch_params: k must be >= 1");
    if (!(eps > 0.0 && eps < 1.0)) throw ParameterError("expander_sketch_params: eps must lie in (0, 1)");
    if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("expander_sketch_params: delta must lie in (0, 1)");
    if (!(c_s > 0.0) || !(c_m > 0.0)) throw ParameterError("expander_sketch_params: constants must be positive");
    const double log_term = std::max(1.0, std::log(static_cast<double>(k) / (delta * eps)));
    const auto s = static_cast<Eigen::Index>(std::ceil(c_s * log_term / eps));
    const auto m = static_cast<Eigen::Index>(std::ceil(c_m * static_cast<double>(k) * log_term / (eps * eps)));
    return {s, round_up_to_multiple(std::max(m, s), s)};
}

DenseMatrix sketch_apply(const GraphSketch& s, const Eigen::Ref<const DenseMatrix>& a) {
    if (s.cols() != a.rows()) {
        throw ShapeError("sketch_apply: sketch has " + std::to_string(s.cols()) + " columns, input has " +
                         std::to_string(a.rows()) + " rows");
    }
    const Eigen::Index deg = s.degree();
    DenseMatrix out = DenseMatrix::Zero(s.rows(), a.cols());
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
        double* dst = out.col(c).data();
        for (Eigen::Index j = 0; j < a.rows(); ++j) {
            const double x = a(j, c);
            if (x == 0.0) continue;
            const auto rows = s.rows_of(j);
            for (Eigen::Index i = 0; i < deg; ++i) dst[rows[static_cast<std::size_t>(i)]] += s.value(j, i) * x;
        }
    }
    return out;
}

DenseMatrix sketch_apply(const GraphSketch& s, const SparseMatrixCSR& a) {
    if (s.cols() != a.rows()) {
        throw ShapeError("sketch_apply: sketch has " + std::to_string(s.cols()) + " columns, input has " +
                         std::to_string(a.rows()) + " rows");
    }
    const Eigen::Index deg = s.degree();
    DenseMatrix out = DenseMatrix::Zero(s.rows(), a.cols());
    for (Eigen::Index j = 0; j < a.outerSize(); ++j) {
        const auto rows = s.rows_of(j);
        for (SparseMatrixCSR::InnerIterator it(a, j); it; ++it) {
            const double x = it.value();
            for (Eigen::Index i = 0; i < deg; ++i) out(rows[static_cast<std::size_t>(i)], it.col()) += s.value(j, i) * x;
        }
    }
    return out;
}

DenseMatrix sketch_apply(const SketchOperator& s, const Eigen::Ref<const DenseMatrix>& a) {
    if (const auto* g = std::get_if<GraphSketch>(&s.op)) return sketch_apply(*g, a);
    const auto& dense = std::get<GaussianSketch>(s.op).entries();
    if (dense.cols() != a.rows()) throw ShapeError("sketch_apply: shape mismatch");
    return dense * a;
}

DenseMatrix sketch_apply(const SketchOperator& s, const SparseMatrixCSR& a) {
    if (const auto* g = std::get_if<GraphSketch>(&s.op)) return sketch_apply(*g, a);
    const auto& dense = std::get<GaussianSketch>(s.op).entries();
    if (dense.cols() != a.rows()) throw ShapeError("sketch_apply: shape mismatch");
    return dense * a;
}

DenseMatrix sketch_densify(const GraphSketch& s) {
    DenseMatrix out = DenseMatrix::Zero(s.rows(), s.cols());
    for (Eigen::Index j = 0; j < s.cols(); ++j) {
        const auto rows = s.rows_of(j);
        for (Eigen::Index i = 0; i < s.degree(); ++i) out(rows[static_cast<std::size_t>(i)], j) = s.value(j, i);
    }
    return out;
}

DenseMatrix sketch_densify(const SketchOperator& s) {
    if (const auto* g = std::get_if<GraphSketch>(&s.op)) return sketch_densify(*g);
    return std::get<GaussianSketch>(s.op).entries();
}

BipartiteGraph sketch_to_graph(const GraphSketch& s) {
    std::vector<std::vector<VertexId>> adj(static_cast<std::size_t>(s.cols()));
    for (Eigen::Index j = 0; j < s.cols(); ++j) {
        const auto rows = s.rows_of(j);
        adj[static_cast<std::size_t>(j)].assign(rows.begin(), rows.end());
    }
    return BipartiteGraph(static_cast<std::size_t>(s.rows()), static_cast<std::size_t>(s.degree()), std::move(adj));
}

SketchOperator make_operator(GraphSketch s, const PrngState& rng) {
    Provenance p;
    p.method = s.degree() == 1 && s.independence().is_full() && s.row_mode() == RowMode::block ? "countsketch" : "graph";
    p.n = s.cols();
    p.m = s.rows();
    p.s = s.degree();
    p.gamma = s.independence().gamma;
    p.row_mode = s.row_mode();
    p.seed = rng.seed();
    p.stream_id = rng.stream_id();
    return {std::move(s), p};
}

SketchOperator make_operator(GaussianSketch s, const PrngState& rng) {
    Provenance p;
    p.method = "gaussian";
    p.n = s.cols();
    p.m = s.rows();
    p.seed = rng.seed();
    p.stream_id = rng.stream_id();
    return {std::move(s), p};
}

SketchOperator make_explicit_operator(GraphSketch s) {
    SketchOperator op = make_operator(std::move(s), PrngState(0));
    op.provenance.method = "explicit";
    return op;
}

SketchOperator make_explicit_operator(GaussianSketch s) {
    SketchOperator op = make_operator(std::move(s), PrngState(0));
    op.provenance.method = "explicit";
    op.provenance.s = 0;
    return op;
}

SketchOperator rebuild_operator(const Provenance& p) {
    const PrngState rng(p.seed, p.stream_id);
    if (p.method == "gaussian") return make_operator(gaussian_sketch_new(p.n, p.m, rng), rng);
    if (p.method == "graph" || p.method == "countsketch") {
        return make_operator(graph_sketch_new(p.n, p.m, p.s, rng, Independence{p.gamma}, p.row_mode), rng);
    }
    throw ParameterError("rebuild_operator: provenance '" + p.method + "' cannot be rebuilt");
}

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

std::uint64_t parse_positive(std::string_view value, std::string_view what) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size() || out == 0) {
        throw ParameterError("method option " + std::string(what) + " needs a positive integer, got '" +
                             std::string(value) + "'");
    }
    return out;
}

}  // namespace

MethodSpec MethodSpec::parse(std::string_view text) {
    const auto parts = split(text, ':');
    MethodSpec spec;
    const auto name = parts.front();
    if (name == "gaussian") {
        if (parts.size() != 1) throw ParameterError("method 'gaussian' takes no options");
        spec.kind = Kind::gaussian;
        spec.s = 0;
        return spec;
    }
    if (name == "countsketch") {
        spec.s = 1;
    } else if (name == "magical") {
        spec.s = 2;
    } else if (name == "graph") {
        spec.s = 0;
    } else {
        throw ParameterError("unknown sketch method '" + std::string(name) + "'");
    }
    for (std::size_t i = 1; i < parts.size(); ++i) {
        const auto eq = parts[i].find('=');
        if (eq == std::string_view::npos) throw ParameterError("malformed method option '" + std::string(parts[i]) + "'");
        const auto key = parts[i].substr(0, eq);
        const auto value = parts[i].substr(eq + 1);
        if (key == "s" && name == "graph") {
            spec.s = static_cast<Eigen::Index>(parse_positive(value, key));
        } else if (key == "gamma") {
            if (value != "full") spec.independence = Independence::gamma_wise(parse_positive(value, key));
        } else if (key == "rows") {
            if (value == "block") {
                spec.row_mode = RowMode::block;
            } else if (value == "subset") {
                spec.row_mode = RowMode::subset;
            } else {
                throw ParameterError("rows must be block or subset");
            }
        } else {
            throw ParameterError("unknown option '" + std::string(key) + "' for method '" + std::string(name) + "'");
        }
    }
    if (spec.s < 1) throw ParameterError("method 'graph' requires s=<degree>");
    return spec;
}

std::string MethodSpec::label() const {
    if (kind == Kind::gaussian) return "gaussian";
    std::string out = "graph:s=" + std::to_string(s);
    if (!independence.is_full()) out += ":gamma=" + std::to_string(independence.gamma);
    if (row_mode == RowMode::subset) out += ":rows=subset";
    return out;
}

Eigen::Index MethodSpec::effective_m(Eigen::Index m_requested) const {
    if (kind == Kind::graph && row_mode == RowMode::block) return round_up_to_multiple(m_requested, s);
    return m_requested;
}

SketchOperator MethodSpec::build(Eigen::Index n, Eigen::Index m_requested, const PrngState& rng) const {
    const Eigen::Index m = effective_m(m_requested);
    if (kind == Kind::gaussian) return make_operator(gaussian_sketch_new(n, m, rng), rng);
    return make_operator(graph_sketch_new(n, m, s, rng, independence, row_mode), rng);
}

}  // namespace sketchbench
