#include "darc/rl/agent_config.hpp"

#include <stdexcept>

namespace darc::rl {

std::string to_string(Algo a) {
    switch (a) {
        case Algo::ddpg: return "ddpg";
        case Algo::td3: return "td3";
        case Algo::sac: return "sac";
        case Algo::darc: return "darc";
    }
    return "?";
}

Algo parse_algo(const std::string& s) {
    if (s == "ddpg") return Algo::ddpg;
    if (s == "td3") return Algo::td3;
    if (s == "sac") return Algo::sac;
    if (s == "darc") return Algo::darc;
    throw std::invalid_argument("algo: expected one of ddpg, td3, sac, darc; got '" + s + "'");
}

namespace {

void require(bool ok, const std::string& key, const std::string& rule) {
    if (!ok) throw std::invalid_argument(key + ": " + rule);
}

}  // namespace

void AgentConfig::validate() const {
    require(gamma > 0.0 && gamma < 1.0, "gamma", "must lie in (0, 1)");
    require(tau > 0.0 && tau <= 1.0, "tau", "must lie in (0, 1]");
    require(nu >= 0.0, "nu", "must be >= 0");
    require(policy_delay >= 1, "policy_delay", "must be >= 1");
    require(exploration_noise >= 0.0, "exploration_noise", "must be >= 0");
    require(target_noise >= 0.0, "target_noise", "must be >= 0");
    require(noise_clip >= 0.0, "noise_clip", "must be >= 0");
    require(sac_alpha >= 0.0, "sac_alpha", "must be >= 0");
    require(batch_size >= 1, "batch_size", "must be >= 1");
    require(buffer_capacity >= 1, "buffer_capacity", "must be >= 1");
    require(actor_lr > 0.0, "actor_lr", "must be > 0");
    require(critic_lr > 0.0, "critic_lr", "must be > 0");
    for (auto h : hidden_dims) require(h >= 1, "hidden_dims", "entries must be >= 1");
    require(reward_weight_accident >= 0.0, "reward_weight_accident", "must be >= 0");
    require(reward_weight_fixation >= 0.0, "reward_weight_fixation", "must be >= 0");
    require(input_scale > 0.0, "input_scale", "must be > 0");
}

nlohmann::json to_json(const AgentConfig& c) {
    return {
        {"algo", to_string(c.algo)},
        {"gamma", c.gamma},
        {"tau", c.tau},
        {"nu", c.nu},
        {"policy_delay", c.policy_delay},
        {"exploration_noise", c.exploration_noise},
        {"target_noise", c.target_noise},
        {"noise_clip", c.noise_clip},
        {"sac_alpha", c.sac_alpha},
        {"batch_size", c.batch_size},
        {"warmup_steps", c.warmup_steps},
        {"buffer_capacity", c.buffer_capacity},
        {"actor_lr", c.actor_lr},
        {"critic_lr", c.critic_lr},
        {"hidden_dims", c.hidden_dims},
        {"reward_weight_accident", c.reward_weight_accident},
        {"reward_weight_fixation", c.reward_weight_fixation},
        {"input_scale", c.input_scale},
    };
}

namespace {

template <typename T>
void read_key(const nlohmann::json& j, const std::string& key, T& out) {
    try {
        out = j.get<T>();
    } catch (const nlohmann::json::exception&) {
        throw std::invalid_argument(key + ": wrong type (" + j.dump() + ")");
    }
}

void read_count(const nlohmann::json& j, const std::string& key, std::size_t& out) {
    if (!j.is_number_integer() || j.get<long long>() < 0) {
        throw std::invalid_argument(key + ": expected a nonnegative integer, got " + j.dump());
    }
    out = j.get<std::size_t>();
}

}  // namespace

AgentConfig agent_config_from_json(const nlohmann::json& j, AgentConfig c) {
    if (!j.is_object()) throw std::invalid_argument("agent: expected an object");
    for (const auto& [key, v] : j.items()) {
        if (key == "algo") {
            std::string s;
            read_key(v, key, s);
            c.algo = parse_algo(s);
        } else if (key == "gamma") read_key(v, key, c.gamma);
        else if (key == "tau") read_key(v, key, c.tau);
        else if (key == "nu") read_key(v, key, c.nu);
        else if (key == "policy_delay") read_count(v, key, c.policy_delay);
        else if (key == "exploration_noise") read_key(v, key, c.exploration_noise);
        else if (key == "target_noise") read_key(v, key, c.target_noise);
        else if (key == "noise_clip") read_key(v, key, c.noise_clip);
        else if (key == "sac_alpha") read_key(v, key, c.sac_alpha);
        else if (key == "batch_size") read_count(v, key, c.batch_size);
        else if (key == "warmup_steps") read_count(v, key, c.warmup_steps);
        else if (key == "buffer_capacity") read_count(v, key, c.buffer_capacity);
        else if (key == "actor_lr") read_key(v, key, c.actor_lr);
        else if (key == "critic_lr") read_key(v, key, c.critic_lr);
        else if (key == "hidden_dims") {
            if (!v.is_array()) throw std::invalid_argument("hidden_dims: expected an array");
            c.hidden_dims.clear();
            for (const auto& e : v) {
                std::size_t h = 0;
                read_count(e, key, h);
                c.hidden_dims.push_back(h);
            }
        } else if (key == "reward_weight_accident") read_key(v, key, c.reward_weight_accident);
        else if (key == "reward_weight_fixation") read_key(v, key, c.reward_weight_fixation);
        else if (key == "input_scale") read_key(v, key, c.input_scale);
        else throw std::invalid_argument(key + ": unknown agent key");
    }
    return c;
}

std::uint64_t config_hash(const AgentConfig& cfg) {
    const std::string s = to_json(cfg).dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace darc::rl
