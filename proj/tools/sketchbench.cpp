// sketchbench: batch harness for sparse graph sketches.
//
//   sketchbench <command> [--config FILE] [--profile NAME] [--seed N] [--out FILE]
//               [--threads N] [--set key=value ...] [--input SPEC] [--methods LIST]
//               [--m-values LIST] [--k K] [--trials T]
//
// Precedence: profile defaults < config file < SKETCHBENCH_SEED < flags.
// Exit codes: 0 ok, 2 config/parameter error, 3 numerical error, 4 rank/guard error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "sketchbench/errors.hpp"
#include "sketchbench/experiment.hpp"

namespace sb = sketchbench;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitRank = 4;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw sb::ConfigError("cannot read config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_notes(const sb::ExperimentConfig& cfg, const std::vector<std::string>& notes) {
    if (notes.empty()) return;
    if (cfg.command == sb::Command::verify_graph && !cfg.output.empty()) {
        std::ofstream out(cfg.output + ".witness.txt");
        for (const auto& n : notes) out << n << '\n';
        return;
    }
    for (const auto& n : notes) std::cerr << n << '\n';
}

int run(int argc, char** argv) {
    CLI::App app{"Sparse graph sketching benchmark harness"};
    std::string command_name;
    std::string config_path;
    std::string profile = "desk";
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_path;
    unsigned threads = 1;
    std::vector<std::string> sets;
    std::optional<std::string> input, methods, m_values;
    std::optional<long> k;
    std::optional<std::size_t> trials;

    app.add_option("command", command_name,
                   "distortion-sweep | lowrank-sweep | lsq-bench | verify-graph | magical-delta | gen")
        ->required();
    app.add_option("--config", config_path, "key=value configuration file");
    app.add_option("--profile", profile, "desk | fig1 | fig3-lowrank")->capture_default_str();
    app.add_option("--seed", seed, "master seed");
    app.add_option("--out", out_path, "output CSV (or .mtx for gen); stdout when omitted");
    app.add_option("--threads", threads, "worker threads")->capture_default_str();
    app.add_option("--set", sets, "override a config key, key=value");
    app.add_option("--input", input, "MatrixMarket path or gen:... spec");
    app.add_option("--methods", methods, "comma-separated method list");
    app.add_option("--m-values", m_values, "comma-separated ascending sketch sizes");
    app.add_option("--k", k, "subspace dimension / target rank");
    app.add_option("--trials", trials, "trials per (method, m)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    const sb::Command command = sb::parse_command(command_name);
    sb::ConfigMap overrides;
    if (!config_path.empty()) overrides = sb::parse_config_text(read_file(config_path));
    if (const char* env = std::getenv("SKETCHBENCH_SEED")) overrides["seed"] = env;
    for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw sb::ConfigError("--set expects key=value, got '" + kv + "'");
        overrides[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    if (seed) overrides["seed"] = std::to_string(*seed);
    if (out_path) overrides["output"] = *out_path;
    if (input) overrides["input"] = *input;
    if (methods) overrides["methods"] = *methods;
    if (m_values) overrides["m_values"] = *m_values;
    if (k) overrides["k"] = std::to_string(*k);
    if (trials) overrides["trials"] = std::to_string(*trials);

    const auto cfg = sb::ExperimentConfig::from_map(command, overrides, profile);

    std::ofstream file;
    if (!cfg.output.empty()) {
        file.open(cfg.output);
        if (!file) throw sb::ConfigError("cannot open output " + cfg.output);
    }
    std::ostream& out = cfg.output.empty() ? std::cout : file;

    if (command == sb::Command::gen) {
        sb::run_gen(cfg, out);
        return 0;
    }
    const auto result = sb::run_experiment(cfg, threads);
    sb::write_csv(result.rows, out);
    write_notes(cfg, result.notes);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const sb::RankError& e) {
        std::cerr << "rank error: " << e.what() << '\n';
        return kExitRank;
    } catch (const sb::GuardError& e) {
        std::cerr << "guard error: " << e.what() << '\n';
        return kExitRank;
    } catch (const sb::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const sb::ParameterError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const sb::ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
