#include "darc/env/environment.hpp"

#include <stdexcept>
#include <string>

#include "darc/env/attention.hpp"

namespace darc::env {

AccidentEnv::AccidentEnv(EnvConfig cfg) : cfg_(cfg) { cfg_.validate(); }

const Episode& AccidentEnv::episode() const {
    if (!episode_) throw std::logic_error("AccidentEnv: no episode loaded");
    return *episode_;
}

bool AccidentEnv::done() const { return episode_ && cursor_ + 1 >= episode_->length(); }

std::vector<double> AccidentEnv::frame_features(std::size_t t, Point fixation) {
    const SaliencyField bottom_up = normalized(episode_->frames[t]);
    auto top_down = foveate(bottom_up, fixation, cfg_.sigma_f);
    degenerate_ = top_down.degenerate;
    return pool_features(combine_attention(bottom_up, top_down.field, cfg_.rho), cfg_.pool_h, cfg_.pool_w);
}

void AccidentEnv::rebuild_observation() {
    obs_.features.clear();
    obs_.features.reserve(cfg_.feature_dim());
    for (const auto& f : stack_) obs_.features.insert(obs_.features.end(), f.begin(), f.end());
    obs_.frame_index = cursor_;
}

const Observation& AccidentEnv::reset(const Episode& episode) {
    if (episode.frames.empty()) throw std::invalid_argument("AccidentEnv::reset: empty episode");
    const auto& f0 = episode.frames.front();
    if (f0.height % cfg_.pool_h != 0 || f0.width % cfg_.pool_w != 0) {
        throw std::invalid_argument("AccidentEnv::reset: episode grid " + std::to_string(f0.height) + "x" +
                                    std::to_string(f0.width) + " incompatible with pooling " +
                                    std::to_string(cfg_.pool_h) + "x" + std::to_string(cfg_.pool_w));
    }
    episode_ = &episode;
    cursor_ = 0;
    stack_.assign(cfg_.stack, frame_features(0, Point{0.5, 0.5}));
    rebuild_observation();
    return obs_;
}

double AccidentEnv::accident_reward(const Episode& ep, std::size_t t, double a) const {
    std::optional<double> t_a;
    if (ep.t_a) t_a = reward_time(static_cast<double>(*ep.t_a), ep.fps, cfg_.time_unit);
    return reward_accident(a, cfg_.a0, ep.y, reward_time(static_cast<double>(t), ep.fps, cfg_.time_unit), t_a);
}

double AccidentEnv::fixation_reward(const Episode& ep, std::size_t t, Point p_hat) const {
    std::optional<double> t_a;
    if (ep.t_a) t_a = static_cast<double>(*ep.t_a);
    return reward_fixation(p_hat, ep.fixation_track[t], static_cast<double>(t), t_a, cfg_.eta,
                           cfg_.fixation_window);
}

StepResult AccidentEnv::step(const DualAction& action) {
    if (!episode_) throw std::logic_error("AccidentEnv::step: reset() not called");
    if (done()) throw std::logic_error("AccidentEnv::step: episode already finished");
    if (!in_unit_square(action.p_hat)) throw std::invalid_argument("AccidentEnv::step: fixation outside [0,1]^2");

    StepResult out;
    out.r_A = accident_reward(*episode_, cursor_, action.a);
    out.r_F = fixation_reward(*episode_, cursor_, action.p_hat);

    ++cursor_;
    stack_.pop_front();
    stack_.push_back(frame_features(cursor_, action.p_hat));
    rebuild_observation();
    out.next_obs = obs_;
    out.done = done();
    return out;
}

}  // namespace darc::env
