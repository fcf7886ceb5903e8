#include "darc/rl/tasks.hpp"

#include <stdexcept>
#include <string>

namespace darc::rl {

env::DualAction to_dual_action(std::span<const double> action) {
    if (action.size() != 3) {
        throw std::invalid_argument("dual action needs 3 components, got " + std::to_string(action.size()));
    }
    return {action[0], {action[1], action[2]}};
}

AccidentTask::AccidentTask(env::EnvConfig cfg, double weight_accident, double weight_fixation)
    : env_(std::move(cfg)), w_a_(weight_accident), w_f_(weight_fixation) {}

Feedback AccidentTask::step(std::span<const double> action) {
    env::StepResult r = env_.step(to_dual_action(action));
    Feedback f;
    f.next_obs = std::move(r.next_obs.features);
    f.r_A = r.r_A;
    f.r_F = r.r_F;
    f.reward = w_a_ * r.r_A + w_f_ * r.r_F;
    f.done = r.done;
    return f;
}

Feedback QuadraticBandit::step(std::span<const double> action) {
    if (done_) throw std::logic_error("QuadraticBandit::step after done");
    if (action.size() != 1) throw std::invalid_argument("QuadraticBandit: action must have 1 component");
    done_ = true;
    const double d = action[0] - target_;
    Feedback f;
    f.next_obs = {1.0};
    f.reward = 1.0 - d * d;
    f.r_A = f.reward;
    f.done = true;
    return f;
}

StepLog train_step(Agent& agent, Task& task, ReplayBuffer& buffer) {
    StepLog log;
    const std::vector<double> s = task.observation();
    log.warmup = agent.env_steps() < agent.config().warmup_steps;
    log.action = log.warmup ? agent.random_action() : agent.select_action(s, Mode::train);

    Feedback fb = task.step(log.action);
    log.reward = fb.reward;
    log.r_A = fb.r_A;
    log.r_F = fb.r_F;
    log.done = fb.done;
    buffer.push({s, log.action, fb.reward, std::move(fb.next_obs), fb.done});
    agent.count_env_step();

    if (agent.env_steps() > agent.config().warmup_steps) {
        log.train = agent.train_on_batch(buffer.sample(agent.config().batch_size));
    }
    return log;
}

}  // namespace darc::rl
