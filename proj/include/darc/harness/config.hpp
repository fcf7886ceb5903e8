#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "darc/env/episode.hpp"
#include "darc/metrics/metrics.hpp"
#include "darc/rl/agent_config.hpp"
#include "json.hpp"

namespace CLI {
class App;
}

namespace darc::harness {

/// Bad user input (flags, config files). The CLI maps it to exit code 1.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr std::uint64_t kEvalSeedBase = 900000000;

struct RunConfig {
    std::vector<std::uint64_t> seeds = {0};
    std::size_t epochs = 30;
    std::size_t episodes_per_epoch = 40;
    std::size_t eval_episode_count = 100;
    std::size_t eval_every = 5;
    std::uint64_t eval_seed_base = kEvalSeedBase;
    /// Worker threads for the seed sweep; 0 picks the hardware count.
    std::size_t threads = 0;
    metrics::Granularity granularity = metrics::Granularity::frame;
    bool write_traces = true;
    env::EnvConfig env;
    rl::AgentConfig agent;
    /// Episode-file directory; generated episodes when empty.
    std::optional<std::filesystem::path> data_dir;
    std::filesystem::path out_dir = "runs";

    /// Throws ConfigError naming the offending key.
    void validate() const;
};

/// Input scale used when the configuration leaves it unset: rescales the
/// pooled features (which average 1 / grid cells) to mean 1.
double default_input_scale(const env::EnvConfig& env);

nlohmann::ordered_json to_json(const RunConfig& cfg);
nlohmann::ordered_json env_to_json(const env::EnvConfig& cfg);
/// Overlays the keys of `j` onto `base`; unknown keys throw ConfigError.
env::EnvConfig env_from_json(const nlohmann::json& j, env::EnvConfig base = {});
RunConfig run_config_from_json(const nlohmann::json& j, RunConfig base = {});

/// Flag values captured before the config file is known.
struct RunOverrides {
    std::optional<std::filesystem::path> config_file;
    std::optional<std::string> algo;
    std::vector<std::uint64_t> seeds;
    std::optional<std::size_t> epochs;
    std::optional<std::size_t> episodes_per_epoch;
    std::optional<std::size_t> eval_episodes;
    std::optional<std::size_t> threads;
    std::optional<std::filesystem::path> data_dir;
    std::optional<std::filesystem::path> out_dir;
    std::optional<double> a0, eta, rho, nu, gamma, tau;
    std::optional<std::string> fixation_window;
    std::optional<std::string> time_unit;
    std::optional<std::string> granularity;
};

void add_run_options(CLI::App& app, RunOverrides& o);
/// defaults < config file < flags. Throws ConfigError.
RunConfig resolve_config(const RunOverrides& o);
/// Parses flag arguments (no program name) and resolves them.
RunConfig parse_config(const std::vector<std::string>& args);

/// Writes config.json into cfg.out_dir (created if missing).
void write_config_snapshot(const RunConfig& cfg);

}  // namespace darc::harness
