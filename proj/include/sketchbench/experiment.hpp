#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sketchbench/errors.hpp"
#include "sketchbench/mmio.hpp"
#include "sketchbench/sketch.hpp"

namespace sketchbench {

enum class Command { distortion_sweep, lowrank_sweep, lsq_bench, verify_graph, magical_delta, gen };

std::string_view to_string(Command c);
/// Throws ParameterError for an unknown command name.
Command parse_command(std::string_view name);

/// Raised for unusable configuration (unknown keys, malformed values).
class ConfigError : public ParameterError {
public:
    using ParameterError::ParameterError;
};

using ConfigMap = std::map<std::string, std::string, std::less<>>;

/// Parses `key = value` lines; '#' starts a comment. Throws ConfigError naming the line.
ConfigMap parse_config_text(std::string_view text);

/// Built-in defaults for "desk", "fig1" and "fig3-lowrank", specialised per command.
ConfigMap profile_defaults(std::string_view profile, Command command);

struct ExperimentConfig {
    Command command = Command::distortion_sweep;
    std::string input = "gen:gaussian:1024x100";
    std::vector<MethodSpec> methods;
    std::vector<Eigen::Index> m_values;
    Eigen::Index k = 10;
    double eps = 0.5;
    double delta = 0.1;
    std::size_t trials = 10;
    std::uint64_t seed = 0;
    std::string output;  // empty: stdout

    // Command-specific knobs.
    double lsq_noise = 0.1;         // lsq-bench: b = A x0 + lsq_noise * e
    bool emit_rel = false;          // lowrank-sweep: also emit lowrank_err_rel rows
    std::string graph = "sketch";   // verify-graph: "sketch" or "identity:<n>"
    Eigen::Index n = 1000;          // verify-graph / magical-delta left-vertex count
    std::size_t samples = 1000;     // magical-delta: graph draws per row

    /// Defaults from `profile`, then `overrides` on top. Throws ConfigError for unknown
    /// keys and malformed values, and checks the invariants (ascending m_values,
    /// trials >= 1, parsable methods).
    static ExperimentConfig from_map(Command command, const ConfigMap& overrides, std::string_view profile = "desk");
};

/// One CSV row.
struct SweepRow {
    std::string command;
    std::string dataset;
    std::string method;
    Eigen::Index n = 0;
    Eigen::Index d = 0;
    Eigen::Index s = 0;
    std::string gamma;
    Eigen::Index m_requested = 0;
    Eigen::Index m_effective = 0;
    Eigen::Index k = 0;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    std::string metric_name;
    double metric_value = 0.0;
    double wall_time_ms = 0.0;
};

inline constexpr std::string_view kCsvHeader =
    "command,dataset,method,n,d,s,gamma,m_requested,m_effective,k,trial,seed,metric_name,metric_value,wall_time_ms";

void write_csv(std::span<const SweepRow> rows, std::ostream& out);

/// Materialises an input spec: a MatrixMarket path, "gen:gaussian:<n>x<d>" or
/// "gen:lowrank:<n>x<d>:<k>:<sigma>". Generated inputs draw from a stream derived
/// from the master seed and the spec string.
AnyMatrix load_input(std::string_view spec, std::uint64_t seed);

/// Stream for trial t of a method at size m: split(master, mix(command, method, m, t)).
PrngState trial_stream(std::uint64_t master_seed, Command command, std::string_view method, Eigen::Index m,
                       std::size_t trial);

struct RunOutput {
    std::vector<SweepRow> rows;
    std::vector<std::string> notes;  // warnings and verify-graph witnesses, in row order
};

/// Runs a sweep command. Rows come back in (method, m, trial) order regardless of
/// `threads`. `gen` is handled by run_gen.
RunOutput run_experiment(const ExperimentConfig& cfg, unsigned threads = 1);

/// Writes the generated or loaded input matrix as MatrixMarket.
void run_gen(const ExperimentConfig& cfg, std::ostream& out);

}  // namespace sketchbench
