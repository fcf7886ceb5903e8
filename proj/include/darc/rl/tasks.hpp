#pragma once

#include <optional>
#include <span>
#include <vector>

#include "darc/env/environment.hpp"
#include "darc/rl/agent.hpp"
#include "darc/rl/replay_buffer.hpp"

namespace darc::rl {

struct Feedback {
    std::vector<double> next_obs;
    double reward = 0.0;  // combined scalar used for learning
    double r_A = 0.0;
    double r_F = 0.0;
    bool done = false;
};

/// Minimal episodic interface the training loop drives.
class Task {
public:
    virtual ~Task() = default;
    virtual std::vector<double> observation() const = 0;
    virtual Feedback step(std::span<const double> action) = 0;
    virtual bool done() const = 0;
    virtual std::size_t obs_dim() const = 0;
    virtual std::size_t action_dim() const = 0;
};

/// AccidentEnv with the flattened action [a, p_x, p_y] and reward
/// w_A * r_A + w_F * r_F.
class AccidentTask final : public Task {
public:
    AccidentTask(env::EnvConfig cfg, double weight_accident, double weight_fixation);
    void reset(const env::Episode& episode) { env_.reset(episode); }
    std::vector<double> observation() const override { return env_.observation().features; }
    Feedback step(std::span<const double> action) override;
    bool done() const override { return env_.done(); }
    std::size_t obs_dim() const override { return env_.config().feature_dim(); }
    std::size_t action_dim() const override { return 3; }
    const env::AccidentEnv& env() const { return env_; }

private:
    env::AccidentEnv env_;
    double w_a_;
    double w_f_;
};

env::DualAction to_dual_action(std::span<const double> action);

/// One state, one step: reward 1 - (a - target)^2.
class QuadraticBandit final : public Task {
public:
    explicit QuadraticBandit(double target = 0.7) : target_(target) {}
    void reset() { done_ = false; }
    std::vector<double> observation() const override { return {1.0}; }
    Feedback step(std::span<const double> action) override;
    bool done() const override { return done_; }
    std::size_t obs_dim() const override { return 1; }
    std::size_t action_dim() const override { return 1; }

private:
    double target_;
    bool done_ = false;
};

struct StepLog {
    std::vector<double> action;
    double reward = 0.0;
    double r_A = 0.0;
    double r_F = 0.0;
    bool done = false;
    bool warmup = false;
    std::optional<TrainLog> train;
};

/// One interaction plus buffer push; uniform random actions until the
/// agent has taken warmup_steps steps, then one gradient phase per step.
StepLog train_step(Agent& agent, Task& task, ReplayBuffer& buffer);

}  // namespace darc::rl
