#pragma once

#include <cstddef>
#include <deque>
#include <vector>

#include "darc/env/episode.hpp"

namespace darc::env {

/// The agent's two simultaneous decisions: accident score and next fixation.
struct DualAction {
    double a = 0.0;
    Point p_hat;

    bool operator==(const DualAction&) const = default;
};

/// Pooled attention grids of the last `stack` frames, oldest first.
struct Observation {
    std::vector<double> features;
    std::size_t frame_index = 0;

    bool operator==(const Observation&) const = default;
};

struct StepResult {
    Observation next_obs;
    double r_A = 0.0;
    double r_F = 0.0;
    bool done = false;

    bool operator==(const StepResult&) const = default;
};

/// Accident-anticipation MDP over one episode at a time.
///
/// At frame t the agent emits (a_t, p_hat_t). The step scores a_t with the
/// accident reward and p_hat_t against the ground-truth fixation p_t, then
/// moves to frame t+1 and builds its observation by foveating that frame at
/// p_hat_t, mixing with the raw frame by rho, pooling, and stacking.
///
/// The environment borrows the episode: it must outlive the reset/step calls.
class AccidentEnv {
public:
    explicit AccidentEnv(EnvConfig cfg);

    const Observation& reset(const Episode& episode);
    StepResult step(const DualAction& action);

    const Observation& observation() const { return obs_; }
    const Episode& episode() const;
    const EnvConfig& config() const { return cfg_; }
    std::size_t cursor() const { return cursor_; }
    bool done() const;
    /// Whether the most recent foveation fell back to a uniform field.
    bool last_foveation_degenerate() const { return degenerate_; }

    /// Rewards the environment would assign to `action` at frame t of `ep`.
    double accident_reward(const Episode& ep, std::size_t t, double a) const;
    double fixation_reward(const Episode& ep, std::size_t t, Point p_hat) const;

private:
    std::vector<double> frame_features(std::size_t t, Point fixation);
    void rebuild_observation();

    EnvConfig cfg_;
    const Episode* episode_ = nullptr;
    std::size_t cursor_ = 0;
    std::deque<std::vector<double>> stack_;
    Observation obs_;
    bool degenerate_ = false;
};

}  // namespace darc::env
