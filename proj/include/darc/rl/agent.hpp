#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "darc/num/adam.hpp"
#include "darc/num/mlp.hpp"
#include "darc/num/rng.hpp"
#include "darc/rl/agent_config.hpp"
#include "darc/rl/replay_buffer.hpp"

namespace darc::rl {

enum class Mode { train, eval };

/// One trainable network with its Polyak-tracked target copy.
struct Network {
    num::MlpSpec spec;
    num::ParamSet online;
    num::ParamSet target;
    num::AdamState adam;
};

struct TrainLog {
    std::vector<double> critic_losses;
    std::optional<std::vector<double>> actor_losses;
};

/// Actor-critic agent state for ddpg / td3 / sac / darc.
///
/// Networks work in the squashed space u in [-1, 1]^n; the public action
/// interface uses a = (u + 1) / 2 in [0, 1]^n. Critics take (s * input_scale, u).
///
/// Deterministic actors end in tanh. SAC actors emit [mean, log_std] per
/// action dimension and sample u = tanh(mean + std * eps).
class Agent {
public:
    Agent(AgentConfig cfg, std::size_t obs_dim, std::size_t action_dim, std::uint64_t seed);

    const AgentConfig& config() const { return cfg_; }
    std::size_t obs_dim() const { return obs_dim_; }
    std::size_t action_dim() const { return action_dim_; }

    std::vector<double> select_action(std::span<const double> obs, Mode mode);
    /// Uniform action in [0, 1]^n, used during warmup.
    std::vector<double> random_action();

    /// One critic step, then an actor step plus target tracking when the
    /// policy delay allows.
    TrainLog train_on_batch(const Batch& batch);
    std::vector<double> critic_update(const Batch& batch);
    /// Actor step(s) followed by soft_update of every target network.
    std::vector<double> actor_update(const Batch& batch);

    std::vector<Network>& actors() { return actors_; }
    const std::vector<Network>& actors() const { return actors_; }
    std::vector<Network>& critics() { return critics_; }
    const std::vector<Network>& critics() const { return critics_; }
    num::Rng& rng() { return rng_; }

    std::uint64_t env_steps() const { return env_steps_; }
    std::uint64_t critic_updates() const { return critic_updates_; }
    std::uint64_t actor_updates() const { return actor_updates_; }
    void count_env_step() { ++env_steps_; }
    void set_counters(std::uint64_t env_steps, std::uint64_t critic_updates, std::uint64_t actor_updates);

    /// Network input for states: s * input_scale.
    num::Tensor scaled_states(const num::Tensor& s) const;
    /// Deterministic squashed actor output u for each row of raw states.
    num::Tensor actor_output(std::size_t actor, const num::Tensor& states, bool use_target) const;
    /// Q values of (states, u) under critic `critic`.
    std::vector<double> q_values(std::size_t critic, const num::Tensor& states, const num::Tensor& u,
                                 bool use_target) const;

private:
    std::vector<double> deterministic_actor_update(std::size_t actor, std::size_t critic, const num::Tensor& s);
    double sac_actor_update(const num::Tensor& s);

    AgentConfig cfg_;
    std::size_t obs_dim_;
    std::size_t action_dim_;
    std::vector<Network> actors_;
    std::vector<Network> critics_;
    num::Rng rng_;
    std::uint64_t env_steps_ = 0;
    std::uint64_t critic_updates_ = 0;
    std::uint64_t actor_updates_ = 0;
};

/// Per-critic losses: MSE(Q_i, y) plus, when both critics are given and
/// nu > 0, the shared term nu * mean((Q_1 - Q_2)^2).
std::vector<double> regularized_critic_losses(std::span<const double> q1, std::span<const double> q2,
                                              std::span<const double> y, double nu);

// Tanh-Gaussian policy helpers (per action dimension).
inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;
/// log N(pre; mean, std) - log(1 - tanh(pre)^2), with pre = mean + std * eps.
double tanh_gaussian_log_prob(double eps, double log_std, double pre_squash);

/// Loss and parameter gradient of the SAC actor objective
/// mean(alpha * log pi(u|s) - min_i Q_i(s, u)) for fixed noise `eps`
/// ([n, action_dim]). Exposed for gradient checking.
struct SacActorObjective {
    double loss = 0.0;
    num::ParamSet grads;
};
SacActorObjective sac_actor_objective(const Agent& agent, const num::ParamSet& actor_params,
                                      const num::Tensor& states, const num::Tensor& eps);

}  // namespace darc::rl
