#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace darc::rl {

enum class Algo { ddpg, td3, sac, darc };

std::string to_string(Algo a);
/// Throws std::invalid_argument for unknown names.
Algo parse_algo(const std::string& s);

struct AgentConfig {
    Algo algo = Algo::darc;
    double gamma = 0.99;
    double tau = 0.005;
    /// Critic-regularization weight (darc only); independent of tau.
    double nu = 0.005;
    std::size_t policy_delay = 2;
    double exploration_noise = 0.1;
    double target_noise = 0.2;
    double noise_clip = 0.5;
    double sac_alpha = 0.2;
    std::size_t batch_size = 256;
    std::size_t warmup_steps = 1000;
    std::size_t buffer_capacity = 100000;
    double actor_lr = 3e-4;
    double critic_lr = 3e-4;
    std::vector<std::size_t> hidden_dims = {64, 64};
    double reward_weight_accident = 1.0;
    double reward_weight_fixation = 1.0;
    /// Multiplier applied to observations before they enter any network.
    double input_scale = 1.0;

    std::size_t actor_count() const { return algo == Algo::darc ? 2 : 1; }
    std::size_t critic_count() const { return algo == Algo::ddpg ? 1 : 2; }
    bool deterministic_policy() const { return algo != Algo::sac; }
    /// Critic updates per actor update.
    std::size_t effective_policy_delay() const {
        return algo == Algo::td3 || algo == Algo::darc ? policy_delay : 1;
    }

    /// Throws std::invalid_argument whose message starts with the key name.
    void validate() const;
};

nlohmann::json to_json(const AgentConfig& cfg);
/// Overlays the keys present in `j` onto `base`. Unknown keys and
/// ill-typed values throw std::invalid_argument naming the key.
AgentConfig agent_config_from_json(const nlohmann::json& j, AgentConfig base = {});

/// FNV-1a over the canonical JSON dump.
std::uint64_t config_hash(const AgentConfig& cfg);

}  // namespace darc::rl
