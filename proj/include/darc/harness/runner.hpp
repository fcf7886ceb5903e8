#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "darc/env/episode.hpp"
#include "darc/harness/config.hpp"
#include "darc/metrics/metrics.hpp"
#include "darc/rl/agent.hpp"

namespace darc::harness {

/// Maps (observation features, episode, frame) to the flat action [a, p_x, p_y].
using Policy = std::function<std::vector<double>(const std::vector<double>& obs, const env::Episode& ep, std::size_t t)>;

/// Noise-free agent policy. The agent must outlive the returned callable.
Policy agent_policy(rl::Agent& agent);
/// Scripted reference: a_t = 1 from the blob onset of positive episodes
/// (0 otherwise) and p_hat_t = p_t.
Policy oracle_policy();
/// a_t = a everywhere, fixation at the image center.
Policy constant_policy(double a);

struct FrameRewards {
    double w_t = 1.0;
    double r_A = 0.0;
    double r_F = 0.0;
};

struct Rollout {
    std::vector<metrics::FrameRecord> records;
    std::vector<FrameRewards> rewards;  // parallel to records
    /// Mean over episodes of the summed weighted reward.
    double mean_episode_reward = 0.0;
};

/// Runs `policy` over every frame of every episode. Frames before the last
/// are stepped through the environment; the last frame, which has no
/// successor, is scored with the same reward functions.
Rollout rollout(const Policy& policy, std::span<const env::Episode> episodes, const env::EnvConfig& env_cfg,
                double weight_accident, double weight_fixation);

struct CurvePoint {
    std::size_t epoch = 0;
    double mean_eval_reward = 0.0;
};

struct SeedArtifacts {
    std::uint64_t seed = 0;
    std::filesystem::path dir;
    metrics::MetricsReport report;
    std::vector<CurvePoint> curve;
    double final_eval_reward = 0.0;
};

struct RunArtifacts {
    RunConfig config;
    std::uint64_t eval_set_hash = 0;
    std::vector<SeedArtifacts> seeds;  // in cfg.seeds order
};

/// Episodes held out for evaluation: the data directory's eval split, or
/// generated episodes with seeds eval_seed_base + i. Throws unless the set
/// holds both positive and negative episodes.
std::vector<env::Episode> eval_episodes(const RunConfig& cfg);

/// Trains one agent per seed (in parallel workers) and writes, under
/// cfg.out_dir: config.json, run.json, and per seed `seed_<n>/` with
/// metrics.json, curve.csv, roc.csv, pr.csv, agent.ckpt and traces/.
/// run.json carries "complete": false until every seed has finished.
RunArtifacts run_training(const RunConfig& cfg);

struct EvalArtifacts {
    metrics::MetricsReport report;
    Rollout rollout;
    std::uint64_t eval_set_hash = 0;
};

/// Evaluates `policy` on `episodes` and writes metrics.json, roc.csv,
/// pr.csv and traces/ into out_dir.
EvalArtifacts evaluate_and_export(const Policy& policy, std::span<const env::Episode> episodes, const RunConfig& cfg,
                                  const std::filesystem::path& out_dir, const nlohmann::ordered_json& extra = {});

/// Loads a checkpoint, rejects dimension mismatches with cfg, and
/// evaluates it on eval_episodes(cfg), writing into cfg.out_dir.
EvalArtifacts run_eval(const std::filesystem::path& checkpoint, const RunConfig& cfg);

}  // namespace darc::harness
