#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "sketchbench/experiment.hpp"

namespace sketchbench {

namespace {

constexpr std::pair<Command, std::string_view> kCommandNames[] = {
    {Command::distortion_sweep, "distortion-sweep"}, {Command::lowrank_sweep, "lowrank-sweep"},
    {Command::lsq_bench, "lsq-bench"},               {Command::verify_graph, "verify-graph"},
    {Command::magical_delta, "magical-delta"},       {Command::gen, "gen"},
};

constexpr std::string_view kKnownKeys[] = {"input", "methods", "m_values", "k",    "eps",     "delta",
                                           "trials", "seed",   "output",   "lsq_noise", "emit_rel", "graph",
                                           "n",      "samples"};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_int(std::string_view key, std::string_view value) {
    T out{};
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw ConfigError("config key '" + std::string(key) + "': expected an integer, got '" + std::string(value) + "'");
    }
    return out;
}

double parse_real(std::string_view key, std::string_view value) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(out)) {
        throw ConfigError("config key '" + std::string(key) + "': expected a real number, got '" + std::string(value) + "'");
    }
    return out;
}

std::vector<std::string_view> split_list(std::string_view value) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start <= value.size()) {
        const auto pos = value.find(',', start);
        const auto item = trim(value.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (!item.empty()) out.push_back(item);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

}  // namespace

std::string_view to_string(Command c) {
    for (const auto& [cmd, name] : kCommandNames)
        if (cmd == c) return name;
    return "unknown";
}

Command parse_command(std::string_view name) {
    for (const auto& [cmd, text] : kCommandNames)
        if (text == name) return cmd;
    throw ConfigError("unknown command '" + std::string(name) + "'");
}

ConfigMap parse_config_text(std::string_view text) {
    ConfigMap out;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        ++line_no;
        auto line = text.substr(start, end - start);
        start = end + 1;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
        }
        const auto key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        out[std::string(key)] = std::string(trim(line.substr(eq + 1)));
    }
    return out;
}

ConfigMap profile_defaults(std::string_view profile, Command command) {
    ConfigMap p;
    if (profile == "desk") {
        p = {{"input", "gen:gaussian:1024x100"},
             {"methods", "graph:s=1,graph:s=2,graph:s=4,gaussian"},
             {"m_values", "200,400,800,1600"},
             {"k", "10"},
             {"trials", "10"}};
        if (command == Command::lowrank_sweep) {
            p["input"] = "gen:lowrank:1024x100:10:0.01";
            p["m_values"] = "20,40,80";
        } else if (command == Command::lsq_bench) {
            p["input"] = "gen:gaussian:2000x10";
            p["m_values"] = "100,200,400,800";
        } else if (command == Command::magical_delta || command == Command::verify_graph) {
            p["methods"] = "magical";
            p["m_values"] = "110";
            p["n"] = command == Command::magical_delta ? "1000" : "30";
            p["k"] = command == Command::magical_delta ? "10" : "3";
            p["trials"] = command == Command::magical_delta ? "1" : "10";
        }
    } else if (profile == "fig1") {
        p = {{"input", "gen:gaussian:4096x1000"},
             {"methods", "graph:s=1,graph:s=2,graph:s=4,graph:s=8,gaussian"},
             {"m_values", "1250,1500,2000,2500,3000,4000"},
             {"k", "10"},
             {"trials", "10"}};
    } else if (profile == "fig3-lowrank") {
        // Movielens-shaped synthetic stand-in; pass --input for real .mtx data.
        p = {{"input", "gen:lowrank:1682x943:10:0.1"},
             {"methods", "graph:s=1,graph:s=2,graph:s=4,graph:s=8,gaussian"},
             {"m_values", "20,40,80,160,320,640"},
             {"k", "10"},
             {"trials", "10"}};
    } else {
        throw ConfigError("unknown profile '" + std::string(profile) + "' (expected desk, fig1 or fig3-lowrank)");
    }
    return p;
}

ExperimentConfig ExperimentConfig::from_map(Command command, const ConfigMap& overrides, std::string_view profile) {
    ConfigMap merged = profile_defaults(profile, command);
    for (const auto& [key, value] : overrides) {
        if (std::find(std::begin(kKnownKeys), std::end(kKnownKeys), key) == std::end(kKnownKeys)) {
            throw ConfigError("unknown config key '" + key + "'");
        }
        merged[key] = value;
    }

    ExperimentConfig cfg;
    cfg.command = command;
    for (const auto& [key, value] : merged) {
        if (key == "input") {
            cfg.input = value;
        } else if (key == "methods") {
            cfg.methods.clear();
            for (auto item : split_list(value)) {
                try {
                    cfg.methods.push_back(MethodSpec::parse(item));
                } catch (const ParameterError& e) {
                    throw ConfigError(std::string("config key 'methods': ") + e.what());
                }
            }
        } else if (key == "m_values") {
            cfg.m_values.clear();
            for (auto item : split_list(value)) cfg.m_values.push_back(parse_int<Eigen::Index>(key, item));
        } else if (key == "k") {
            cfg.k = parse_int<Eigen::Index>(key, value);
        } else if (key == "eps") {
            cfg.eps = parse_real(key, value);
        } else if (key == "delta") {
            cfg.delta = parse_real(key, value);
        } else if (key == "trials") {
            cfg.trials = parse_int<std::size_t>(key, value);
        } else if (key == "seed") {
            cfg.seed = parse_int<std::uint64_t>(key, value);
        } else if (key == "output") {
            cfg.output = value;
        } else if (key == "lsq_noise") {
            cfg.lsq_noise = parse_real(key, value);
        } else if (key == "emit_rel") {
            if (value != "true" && value != "false" && value != "1" && value != "0") {
                throw ConfigError("config key 'emit_rel': expected true or false");
            }
            cfg.emit_rel = value == "true" || value == "1";
        } else if (key == "graph") {
            cfg.graph = value;
        } else if (key == "n") {
            cfg.n = parse_int<Eigen::Index>(key, value);
        } else if (key == "samples") {
            cfg.samples = parse_int<std::size_t>(key, value);
        }
    }

    if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
    if (cfg.command != Command::gen) {
        if (cfg.methods.empty() && !(cfg.command == Command::verify_graph && cfg.graph != "sketch")) {
            throw ConfigError("methods must list at least one sketch method");
        }
        if (cfg.m_values.empty() && !(cfg.command == Command::verify_graph && cfg.graph != "sketch")) {
            throw ConfigError("m_values must list at least one sketch size");
        }
    }
    for (std::size_t i = 0; i < cfg.m_values.size(); ++i) {
        if (cfg.m_values[i] < 1) throw ConfigError("m_values must be positive");
        if (i > 0 && cfg.m_values[i] <= cfg.m_values[i - 1]) throw ConfigError("m_values must be strictly ascending");
    }
    if (cfg.k < 0) throw ConfigError("k must be >= 0");
    if (cfg.n < 1) throw ConfigError("n must be >= 1");
    if (cfg.samples < 1) throw ConfigError("samples must be >= 1");
    if (!(cfg.lsq_noise >= 0.0)) throw ConfigError("lsq_noise must be >= 0");
    if (!(cfg.eps > 0.0 && cfg.eps < 1.0)) throw ConfigError("eps must lie in (0, 1)");
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
    return cfg;
}

}  // namespace sketchbench
