#include "sketchbench/experiment.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <ostream>
#include <sstream>
#include <thread>

#include "sketchbench/errors.hpp"
#include "sketchbench/graph.hpp"
#include "sketchbench/linalg.hpp"
#include "sketchbench/metrics.hpp"
#include "sketchbench/pipelines.hpp"

namespace sketchbench {

namespace {

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::string format_fixed(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 3);
    return std::string(buf, ptr);
}

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

template <typename T>
T parse_number(std::string_view text, std::string_view spec) {
    T out{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ConfigError("malformed generator spec '" + std::string(spec) + "'");
    }
    return out;
}

std::pair<Eigen::Index, Eigen::Index> parse_shape(std::string_view text, std::string_view spec) {
    const auto x = text.find('x');
    if (x == std::string_view::npos) throw ConfigError("generator spec '" + std::string(spec) + "' needs <n>x<d>");
    return {parse_number<Eigen::Index>(text.substr(0, x), spec), parse_number<Eigen::Index>(text.substr(x + 1), spec)};
}

std::string dataset_name(std::string_view spec) {
    std::string name(spec);
    for (auto& c : name)
        if (c == ',' || c == '\n') c = '_';
    return name;
}

std::string gamma_label(const MethodSpec& spec) {
    if (spec.kind == MethodSpec::Kind::gaussian) return "na";
    return spec.independence.is_full() ? "full" : std::to_string(spec.independence.gamma);
}

/// Runs tasks[0..count) on a pool; results land in per-index slots so order is fixed.
/// The lowest-index failure is rethrown after all workers finish.
void run_pool(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& task) {
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                task(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

struct TaskKey {
    std::size_t method;
    std::size_t m_index;
    std::size_t trial;
};

std::vector<TaskKey> enumerate_tasks(const ExperimentConfig& cfg) {
    std::vector<TaskKey> keys;
    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi)
        for (std::size_t j = 0; j < cfg.m_values.size(); ++j)
            for (std::size_t t = 0; t < cfg.trials; ++t) keys.push_back({mi, j, t});
    return keys;
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

DenseMatrix as_dense(const AnyMatrix& a) {
    if (const auto* d = std::get_if<DenseMatrix>(&a)) return *d;
    return densify(std::get<SparseMatrixCSR>(a));
}

Eigen::Index rows_of(const AnyMatrix& a) {
    return std::visit([](const auto& m) { return static_cast<Eigen::Index>(m.rows()); }, a);
}

Eigen::Index cols_of(const AnyMatrix& a) {
    return std::visit([](const auto& m) { return static_cast<Eigen::Index>(m.cols()); }, a);
}

SweepRow base_row(const ExperimentConfig& cfg, const std::string& dataset, const MethodSpec& spec, Eigen::Index n,
                  Eigen::Index d, Eigen::Index m, std::size_t trial) {
    SweepRow row;
    row.command = std::string(to_string(cfg.command));
    row.dataset = dataset;
    row.method = spec.label();
    row.n = n;
    row.d = d;
    row.s = spec.kind == MethodSpec::Kind::gaussian ? 0 : spec.s;
    row.gamma = gamma_label(spec);
    row.m_requested = m;
    row.m_effective = spec.effective_m(m);
    row.k = cfg.k;
    row.trial = trial;
    row.seed = cfg.seed;
    return row;
}

RunOutput run_distortion(const ExperimentConfig& cfg, unsigned threads) {
    const AnyMatrix input = load_input(cfg.input, cfg.seed);
    const DenseMatrix a = as_dense(input);
    if (a.rows() < a.cols()) throw RankError("distortion-sweep: input has fewer rows than columns");
    auto qr = thin_qr(a);
    const Vector diag = qr.r.diagonal().cwiseAbs();
    if (diag.size() > 0 && !(diag.minCoeff() > 1e-10 * diag.maxCoeff())) {
        throw RankError("distortion-sweep: input matrix is not of full column rank");
    }
    const DenseMatrix& u = qr.q;
    const std::string dataset = dataset_name(cfg.input);
    const auto keys = enumerate_tasks(cfg);
    std::vector<SweepRow> rows(keys.size());
    run_pool(keys.size(), threads, [&](std::size_t i) {
        const auto& key = keys[i];
        const auto& spec = cfg.methods[key.method];
        const Eigen::Index m = cfg.m_values[key.m_index];
        const auto start = std::chrono::steady_clock::now();
        const auto op = spec.build(a.rows(), m, trial_stream(cfg.seed, cfg.command, spec.label(), m, key.trial));
        const auto res = distortion_of_sketched_basis(sketch_apply(op, u));
        SweepRow row = base_row(cfg, dataset, spec, a.rows(), a.cols(), m, key.trial);
        row.metric_name = "distortion";
        row.metric_value = res.eta;
        row.wall_time_ms = elapsed_ms(start);
        rows[i] = std::move(row);
    });
    return {std::move(rows), {}};
}

RunOutput run_lowrank(const ExperimentConfig& cfg, unsigned threads) {
    const AnyMatrix input = load_input(cfg.input, cfg.seed);
    const Eigen::Index n = rows_of(input);
    const Eigen::Index d = cols_of(input);
    if (cfg.k < 1 || cfg.k > std::min(n, d)) throw ConfigError("lowrank-sweep: k must lie in [1, min(n, d)]");
    const double optimal = std::visit([&](const auto& a) { return best_rank_k_error(a, cfg.k); }, input);
    const std::string dataset = dataset_name(cfg.input);
    const auto keys = enumerate_tasks(cfg);
    std::vector<std::vector<SweepRow>> rows(keys.size());
    std::vector<std::string> notes(keys.size());
    run_pool(keys.size(), threads, [&](std::size_t i) {
        const auto& key = keys[i];
        const auto& spec = cfg.methods[key.method];
        const Eigen::Index m = cfg.m_values[key.m_index];
        SweepRow row = base_row(cfg, dataset, spec, n, d, m, key.trial);
        if (spec.effective_m(m) < cfg.k) {
            if (key.trial == 0) {
                row.metric_name = "skipped_m_below_k";
                row.metric_value = 0.0;
                rows[i].push_back(row);
                notes[i] = "warning: " + spec.label() + " m=" + std::to_string(m) + " is below k=" +
                           std::to_string(cfg.k) + "; skipped";
            }
            return;
        }
        const auto start = std::chrono::steady_clock::now();
        const auto op = spec.build(n, m, trial_stream(cfg.seed, cfg.command, spec.label(), m, key.trial));
        const auto res = std::visit([&](const auto& a) { return lowrank_approx(a, cfg.k, op, optimal); }, input);
        row.wall_time_ms = elapsed_ms(start);
        if (res.rank_deficient) {
            notes[i] = "warning: " + spec.label() + " m=" + std::to_string(m) + " trial=" + std::to_string(key.trial) +
                       " sketch rank " + std::to_string(res.sketch_rank) + " < k";
        }
        row.metric_name = "lowrank_ratio";
        row.metric_value = res.ratio;
        rows[i].push_back(row);
        if (cfg.emit_rel) {
            row.metric_name = "lowrank_err_rel";
            row.metric_value = res.ratio - 1.0;
            rows[i].push_back(row);
        }
    });
    RunOutput out;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        for (auto& r : rows[i]) out.rows.push_back(std::move(r));
        if (!notes[i].empty()) out.notes.push_back(std::move(notes[i]));
    }
    return out;
}

RunOutput run_lsq(const ExperimentConfig& cfg, unsigned threads) {
    const DenseMatrix a = as_dense(load_input(cfg.input, cfg.seed));
    PrngState rhs_rng = prng_split(prng_new(cfg.seed), stable_hash("lsq-rhs:" + cfg.input));
    const DenseMatrix x0 = gen_gaussian(a.cols(), 1, rhs_rng);
    DenseMatrix b = a * x0;
    if (cfg.lsq_noise > 0.0) b += cfg.lsq_noise * gen_gaussian(a.rows(), 1, rhs_rng);
    const std::string dataset = dataset_name(cfg.input);
    const auto keys = enumerate_tasks(cfg);
    std::vector<SweepRow> rows(keys.size());
    run_pool(keys.size(), threads, [&](std::size_t i) {
        const auto& key = keys[i];
        const auto& spec = cfg.methods[key.method];
        const Eigen::Index m = cfg.m_values[key.m_index];
        const auto start = std::chrono::steady_clock::now();
        const auto op = spec.build(a.rows(), m, trial_stream(cfg.seed, cfg.command, spec.label(), m, key.trial));
        const auto res = sketch_and_solve_lsq(a, b, op);
        SweepRow row = base_row(cfg, dataset, spec, a.rows(), a.cols(), m, key.trial);
        row.metric_name = "lsq_ratio";
        row.metric_value = res.ratio;
        row.wall_time_ms = elapsed_ms(start);
        rows[i] = std::move(row);
    });
    return {std::move(rows), {}};
}

std::string join_ids(const std::vector<VertexId>& ids) {
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) out += ' ';
        out += std::to_string(ids[i]);
    }
    return out;
}

RunOutput run_verify(const ExperimentConfig& cfg, unsigned threads) {
    const auto k = static_cast<std::size_t>(cfg.k);
    if (cfg.graph != "sketch") {
        const auto parts = split(cfg.graph, ':');
        if (parts.size() != 2 || parts[0] != "identity") {
            throw ConfigError("verify-graph: graph must be 'sketch' or 'identity:<n>'");
        }
        const auto n = parse_number<std::size_t>(parts[1], cfg.graph);
        const auto start = std::chrono::steady_clock::now();
        const auto g = BipartiteGraph::identity(n);
        const auto res = verify_expansion(g, k, cfg.eps);
        SweepRow row;
        row.command = std::string(to_string(cfg.command));
        row.dataset = dataset_name(cfg.graph);
        row.method = "identity";
        row.n = static_cast<Eigen::Index>(n);
        row.s = 1;
        row.gamma = "na";
        row.m_requested = row.m_effective = static_cast<Eigen::Index>(n);
        row.k = cfg.k;
        row.seed = cfg.seed;
        row.metric_name = "expansion_holds";
        row.metric_value = res.holds ? 1.0 : 0.0;
        row.wall_time_ms = elapsed_ms(start);
        RunOutput out;
        out.rows.push_back(row);
        out.notes.push_back("identity m=" + std::to_string(n) + " trial=0 " +
                            (res.holds ? std::string("holds") : "witness=" + join_ids(*res.witness)));
        return out;
    }

    const auto keys = enumerate_tasks(cfg);
    std::vector<SweepRow> rows(keys.size());
    std::vector<std::string> notes(keys.size());
    const std::string dataset = "graph:n=" + std::to_string(cfg.n);
    run_pool(keys.size(), threads, [&](std::size_t i) {
        const auto& key = keys[i];
        const auto& spec = cfg.methods[key.method];
        if (spec.kind != MethodSpec::Kind::graph) throw ConfigError("verify-graph: method must be a graph sketch");
        const Eigen::Index m = cfg.m_values[key.m_index];
        const auto start = std::chrono::steady_clock::now();
        const auto op = spec.build(cfg.n, m, trial_stream(cfg.seed, cfg.command, spec.label(), m, key.trial));
        const auto res = verify_expansion(sketch_to_graph(op.graph()), k, cfg.eps);
        SweepRow row = base_row(cfg, dataset, spec, cfg.n, 0, m, key.trial);
        row.metric_name = "expansion_holds";
        row.metric_value = res.holds ? 1.0 : 0.0;
        row.wall_time_ms = elapsed_ms(start);
        notes[i] = spec.label() + " m=" + std::to_string(row.m_effective) + " trial=" + std::to_string(key.trial) + " " +
                   (res.holds ? std::string("holds") : "witness=" + join_ids(*res.witness));
        rows[i] = std::move(row);
    });
    return {std::move(rows), std::move(notes)};
}

RunOutput run_magical(const ExperimentConfig& cfg, unsigned threads) {
    const auto keys = enumerate_tasks(cfg);
    std::vector<SweepRow> rows(keys.size());
    const std::string dataset = "graph:n=" + std::to_string(cfg.n);
    run_pool(keys.size(), threads, [&](std::size_t i) {
        const auto& key = keys[i];
        const auto& spec = cfg.methods[key.method];
        if (spec.kind != MethodSpec::Kind::graph) throw ConfigError("magical-delta: method must be a graph sketch");
        const Eigen::Index m = cfg.m_values[key.m_index];
        const auto start = std::chrono::steady_clock::now();
        const double rate = estimate_magical_delta(
            static_cast<std::size_t>(cfg.n), static_cast<std::size_t>(spec.effective_m(m)), static_cast<std::size_t>(spec.s),
            static_cast<std::size_t>(cfg.k), cfg.samples,
            trial_stream(cfg.seed, cfg.command, spec.label(), m, key.trial), spec.row_mode, spec.independence);
        SweepRow row = base_row(cfg, dataset, spec, cfg.n, 0, m, key.trial);
        row.metric_name = "failure_rate";
        row.metric_value = rate;
        row.wall_time_ms = elapsed_ms(start);
        rows[i] = std::move(row);
    });
    return {std::move(rows), {}};
}

}  // namespace

void write_csv(std::span<const SweepRow> rows, std::ostream& out) {
    out << kCsvHeader << '\n';
    for (const auto& r : rows) {
        out << r.command << ',' << r.dataset << ',' << r.method << ',' << r.n << ',' << r.d << ',' << r.s << ','
            << r.gamma << ',' << r.m_requested << ',' << r.m_effective << ',' << r.k << ',' << r.trial << ','
            << r.seed << ',' << r.metric_name << ',' << format_double(r.metric_value) << ','
            << format_fixed(r.wall_time_ms) << '\n';
    }
}

AnyMatrix load_input(std::string_view spec, std::uint64_t seed) {
    if (spec.starts_with("gen:")) {
        const auto parts = split(spec, ':');
        PrngState rng = prng_split(prng_new(seed), stable_hash(spec));
        if (parts.size() == 3 && parts[1] == "gaussian") {
            const auto [n, d] = parse_shape(parts[2], spec);
            if (n < 1 || d < 1) throw ConfigError("generator spec '" + std::string(spec) + "' needs positive sizes");
            return gen_gaussian(n, d, rng);
        }
        if (parts.size() == 5 && parts[1] == "lowrank") {
            const auto [n, d] = parse_shape(parts[2], spec);
            const auto k = parse_number<Eigen::Index>(parts[3], spec);
            const auto sigma = parse_number<double>(parts[4], spec);
            return gen_low_rank_plus_noise(n, d, k, sigma, rng);
        }
        throw ConfigError("unknown generator spec '" + std::string(spec) + "'");
    }
    return mm_read(std::filesystem::path(std::string(spec)));
}

PrngState trial_stream(std::uint64_t master_seed, Command command, std::string_view method, Eigen::Index m,
                       std::size_t trial) {
    std::uint64_t id = stable_hash(to_string(command));
    id = hash_combine(id, stable_hash(method));
    id = hash_combine(id, static_cast<std::uint64_t>(m));
    id = hash_combine(id, static_cast<std::uint64_t>(trial));
    return prng_split(prng_new(master_seed), id);
}

RunOutput run_experiment(const ExperimentConfig& cfg, unsigned threads) {
    switch (cfg.command) {
        case Command::distortion_sweep: return run_distortion(cfg, threads);
        case Command::lowrank_sweep: return run_lowrank(cfg, threads);
        case Command::lsq_bench: return run_lsq(cfg, threads);
        case Command::verify_graph: return run_verify(cfg, threads);
        case Command::magical_delta: return run_magical(cfg, threads);
        case Command::gen: break;
    }
    throw ConfigError("run_experiment: 'gen' writes a matrix; use run_gen");
}

void run_gen(const ExperimentConfig& cfg, std::ostream& out) {
    const AnyMatrix a = load_input(cfg.input, cfg.seed);
    std::visit([&](const auto& m) { mm_write(m, out); }, a);
}

}  // namespace sketchbench
