#include "darc/harness/runner.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "darc/env/environment.hpp"
#include "darc/env/reward.hpp"
#include "darc/harness/dataset.hpp"
#include "darc/harness/report_io.hpp"
#include "darc/rl/checkpoint.hpp"
#include "darc/rl/replay_buffer.hpp"
#include "darc/rl/tasks.hpp"

namespace darc::harness {

Policy agent_policy(rl::Agent& agent) {
    return [&agent](const std::vector<double>& obs, const env::Episode&, std::size_t) {
        return agent.select_action(obs, rl::Mode::eval);
    };
}

Policy oracle_policy() {
    return [](const std::vector<double>&, const env::Episode& ep, std::size_t t) {
        const auto onset = env::blob_onset(ep);
        const env::Point p = ep.fixation_track[t];
        return std::vector<double>{onset && t >= *onset ? 1.0 : 0.0, p.x, p.y};
    };
}

Policy constant_policy(double a) {
    return [a](const std::vector<double>&, const env::Episode&, std::size_t) { return std::vector<double>{a, 0.5, 0.5}; };
}

Rollout rollout(const Policy& policy, std::span<const env::Episode> episodes, const env::EnvConfig& env_cfg,
                double weight_accident, double weight_fixation) {
    Rollout out;
    env::AccidentEnv env(env_cfg);
    double total = 0.0;
    for (const auto& ep : episodes) {
        env.reset(ep);
        const auto time = [&](double frame) { return env::reward_time(frame, ep.fps, env_cfg.time_unit); };
        for (std::size_t t = 0; t < ep.length(); ++t) {
            const auto action = policy(env.observation().features, ep, t);
            const env::DualAction dual = rl::to_dual_action(action);
            FrameRewards fr;
            if (!env.done()) {
                const auto step = env.step(dual);
                fr.r_A = step.r_A;
                fr.r_F = step.r_F;
            } else {
                fr.r_A = env.accident_reward(ep, t, dual.a);
                fr.r_F = env.fixation_reward(ep, t, dual.p_hat);
            }
            if (ep.t_a) fr.w_t = env::accident_weight(time(static_cast<double>(t)), time(static_cast<double>(*ep.t_a)));
            total += weight_accident * fr.r_A + weight_fixation * fr.r_F;

            metrics::FrameRecord rec;
            rec.episode_id = ep.id;
            rec.t = t;
            rec.score = dual.a;
            rec.y = ep.y;
            rec.t_a = ep.t_a;
            rec.p_hat = dual.p_hat;
            rec.p = ep.fixation_track[t];
            rec.fps = ep.fps;
            out.records.push_back(rec);
            out.rewards.push_back(fr);
        }
    }
    out.mean_episode_reward = episodes.empty() ? 0.0 : total / static_cast<double>(episodes.size());
    return out;
}

std::vector<env::Episode> eval_episodes(const RunConfig& cfg) {
    std::vector<env::Episode> eps;
    if (cfg.data_dir) {
        eps = split_dataset(load_dataset(*cfg.data_dir)).eval;
        if (eps.empty()) throw std::runtime_error("data directory has no held-out episodes: " + cfg.data_dir->string());
    } else {
        eps = generated_eval_set(cfg.env, cfg.eval_episode_count, cfg.eval_seed_base);
    }
    std::size_t pos = 0;
    for (const auto& ep : eps) {
        check_compatible(ep, cfg.env);
        pos += ep.y;
    }
    if (pos == 0 || pos == eps.size()) {
        throw std::runtime_error("eval set has " + std::to_string(pos) + " positive and " +
                                 std::to_string(eps.size() - pos) +
                                 " negative episodes; AUC and AP need both (use more episodes)");
    }
    return eps;
}

EvalArtifacts evaluate_and_export(const Policy& policy, std::span<const env::Episode> episodes, const RunConfig& cfg,
                                  const std::filesystem::path& out_dir, const nlohmann::ordered_json& extra) {
    EvalArtifacts a;
    a.rollout = rollout(policy, episodes, cfg.env, cfg.agent.reward_weight_accident, cfg.agent.reward_weight_fixation);
    a.eval_set_hash = episode_set_hash(episodes);
    metrics::ReportOptions opts;
    opts.a_0 = cfg.env.a0;
    opts.granularity = cfg.granularity;
    opts.window = cfg.env.fixation_window;
    a.report = metrics::compile_report(a.rollout.records, opts);

    std::filesystem::create_directories(out_dir);
    nlohmann::ordered_json j = extra.is_object() ? extra : nlohmann::ordered_json::object();
    j["eval_set_hash"] = hex64(a.eval_set_hash);
    j["eval_episodes"] = episodes.size();
    j["mean_eval_reward"] = a.rollout.mean_episode_reward;
    const auto report = metrics::report_to_json(a.report);
    for (const auto& [k, v] : report.items()) j[k] = v;
    write_json_file(out_dir / "metrics.json", j);
    metrics::write_roc_csv(out_dir / "roc.csv", a.report.roc_points);
    metrics::write_pr_csv(out_dir / "pr.csv", a.report.pr_points);
    if (cfg.write_traces) write_traces(out_dir / "traces", a.rollout);
    return a;
}

namespace {

SeedArtifacts train_seed(const RunConfig& cfg, std::uint64_t seed, std::span<const env::Episode> train_pool,
                         std::span<const env::Episode> eval_set) {
    SeedArtifacts out;
    out.seed = seed;
    out.dir = cfg.out_dir / ("seed_" + std::to_string(seed));
    std::filesystem::create_directories(out.dir);

    num::Rng env_rng(seed);
    rl::Agent agent(cfg.agent, cfg.env.feature_dim(), 3, seed + 1000);
    rl::ReplayBuffer buffer(cfg.agent.buffer_capacity, seed + 2000);
    rl::AccidentTask task(cfg.env, cfg.agent.reward_weight_accident, cfg.agent.reward_weight_fixation);
    const Policy policy = agent_policy(agent);

    env::Episode generated;
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        for (std::size_t k = 0; k < cfg.episodes_per_epoch; ++k) {
            const env::Episode* ep = nullptr;
            if (train_pool.empty()) {
                generated = env::generate_episode(cfg.env, env_rng.next_u64());
                ep = &generated;
            } else {
                ep = &train_pool[env_rng.index(train_pool.size())];
            }
            task.reset(*ep);
            while (!task.done()) rl::train_step(agent, task, buffer);
        }
        if (epoch % cfg.eval_every == 0 || epoch == cfg.epochs) {
            const Rollout r = rollout(policy, eval_set, cfg.env, cfg.agent.reward_weight_accident,
                                      cfg.agent.reward_weight_fixation);
            out.curve.push_back({epoch, r.mean_episode_reward});
        }
    }
    out.final_eval_reward = out.curve.back().mean_eval_reward;

    nlohmann::ordered_json extra;
    extra["algo"] = rl::to_string(cfg.agent.algo);
    extra["seed"] = seed;
    extra["epochs"] = cfg.epochs;
    extra["env_steps"] = agent.env_steps();
    extra["config_hash"] = hex64(rl::config_hash(cfg.agent));
    extra["final_eval_reward"] = out.final_eval_reward;
    out.report = evaluate_and_export(policy, eval_set, cfg, out.dir, extra).report;
    write_curve_csv(out.dir / "curve.csv", out.curve);
    rl::save_agent(out.dir / "agent.ckpt", agent);
    return out;
}

void write_run_json(const RunConfig& cfg, std::uint64_t eval_hash, bool complete) {
    nlohmann::ordered_json j;
    j["algo"] = rl::to_string(cfg.agent.algo);
    j["seeds"] = cfg.seeds;
    j["eval_set_hash"] = hex64(eval_hash);
    j["complete"] = complete;
    write_json_file(cfg.out_dir / "run.json", j);
}

}  // namespace

RunArtifacts run_training(const RunConfig& cfg) {
    cfg.validate();
    RunArtifacts art;
    art.config = cfg;
    std::vector<env::Episode> train_pool;
    if (cfg.data_dir) {
        auto split = split_dataset(load_dataset(*cfg.data_dir));
        train_pool = std::move(split.train);
        if (train_pool.empty()) throw std::runtime_error("data directory has no training episodes: " + cfg.data_dir->string());
        for (const auto& ep : train_pool) check_compatible(ep, cfg.env);
    }
    const std::vector<env::Episode> eval_set = eval_episodes(cfg);
    art.eval_set_hash = episode_set_hash(eval_set);

    write_config_snapshot(cfg);
    write_run_json(cfg, art.eval_set_hash, false);

    art.seeds.resize(cfg.seeds.size());
    std::vector<std::exception_ptr> errors(cfg.seeds.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cfg.seeds.size(); i = next++) {
            try {
                art.seeds[i] = train_seed(cfg, cfg.seeds[i], train_pool, eval_set);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::size_t n_threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min(n_threads, cfg.seeds.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    write_run_json(cfg, art.eval_set_hash, true);
    return art;
}

EvalArtifacts run_eval(const std::filesystem::path& checkpoint, const RunConfig& cfg) {
    rl::Agent agent = rl::load_agent(checkpoint);
    if (agent.obs_dim() != cfg.env.feature_dim()) {
        throw std::invalid_argument("checkpoint observation dim " + std::to_string(agent.obs_dim()) +
                                    " does not match the config's feature_dim " + std::to_string(cfg.env.feature_dim()) +
                                    " (stack x pool_h x pool_w)");
    }
    if (agent.action_dim() != 3) {
        throw std::invalid_argument("checkpoint action dim " + std::to_string(agent.action_dim()) + ", expected 3");
    }
    const auto eval_set = eval_episodes(cfg);
    nlohmann::ordered_json extra;
    extra["algo"] = rl::to_string(agent.config().algo);
    extra["checkpoint"] = checkpoint.filename().string();
    extra["config_hash"] = hex64(rl::config_hash(agent.config()));
    return evaluate_and_export(agent_policy(agent), eval_set, cfg, cfg.out_dir, extra);
}

}  // namespace darc::harness
