#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "darc/env/field.hpp"
#include "darc/env/reward.hpp"

namespace darc::env {

/// Unit in which frame indices are handed to the earliness weight.
/// seconds: t / fps (the weight decays over seconds); frames: raw indices.
enum class TimeUnit { seconds, frames };

std::string to_string(TimeUnit u);
TimeUnit parse_time_unit(const std::string& s);

struct EnvConfig {
    double a0 = 0.5;
    double eta = 0.08;
    double rho = 0.5;
    double sigma_f = 0.15;
    std::size_t stack = 4;
    std::size_t grid_h = 16;
    std::size_t grid_w = 16;
    std::size_t pool_h = 8;
    std::size_t pool_w = 8;
    std::size_t episode_length = 100;
    double accident_prob = 0.5;
    double ta_min_frac = 0.6;
    double ta_max_frac = 0.9;
    double fps = 10.0;
    FixationWindow fixation_window = FixationWindow::after_accident;
    TimeUnit time_unit = TimeUnit::seconds;

    std::size_t feature_dim() const { return stack * pool_h * pool_w; }
    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

// Synthetic generator constants.
inline constexpr std::size_t kBlobRampFrames = 20;
inline constexpr double kBlobSigma = 0.1;
inline constexpr double kBlobPeak = 4.0;
inline constexpr double kBackgroundNoise = 0.05;

struct Episode {
    std::uint64_t id = 0;
    std::vector<SaliencyField> frames;
    bool y = false;
    std::optional<std::size_t> t_a;
    std::vector<Point> fixation_track;
    double fps = 10.0;
    /// Generator metadata (risk blob center); not serialized, not compared.
    std::optional<Point> risk_location;

    std::size_t length() const { return frames.size(); }
    /// Throws std::invalid_argument describing the first violated invariant.
    void validate() const;

    /// Compares file content only.
    bool operator==(const Episode& o) const {
        return frames == o.frames && y == o.y && t_a == o.t_a && fixation_track == o.fixation_track &&
               fps == o.fps;
    }
};

/// First frame at which a positive episode's risk blob is present:
/// max(0, t_a - kBlobRampFrames). Empty for negative episodes.
std::optional<std::size_t> blob_onset(const Episode& ep);

/// Converts a frame index to the time unit used by the reward functions.
double reward_time(double frame, double fps, TimeUnit unit);

/// Deterministic synthetic dashcam episode. Fields are normalized.
Episode generate_episode(const EnvConfig& cfg, std::uint64_t seed);

}  // namespace darc::env
