#include "darc/rl/targets.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace darc::rl {

namespace {

std::vector<double> bootstrap(const Batch& batch, double gamma, const std::vector<double>& value) {
    std::vector<double> y(batch.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = batch.r[i] + gamma * (1.0 - batch.done[i]) * value[i];
    return y;
}

num::Tensor smoothed_target_action(const Agent& agent, std::size_t actor, const num::Tensor& s_next,
                                   const num::Tensor& noise) {
    num::Tensor u = agent.actor_output(actor, s_next, true);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::clamp(u[i] + noise[i], -1.0, 1.0);
    return u;
}

void require_algo(const Agent& agent, std::initializer_list<Algo> allowed, const char* what) {
    for (Algo a : allowed) {
        if (agent.config().algo == a) return;
    }
    throw std::invalid_argument(std::string(what) + ": not applicable to " + to_string(agent.config().algo));
}

}  // namespace

num::Tensor smoothing_noise(std::size_t rows, std::size_t cols, double sigma, double clip, num::Rng& rng) {
    num::Tensor n = num::Tensor::matrix(rows, cols);
    for (double& v : n.data()) v = std::clamp(sigma * rng.normal(), -clip, clip);
    return n;
}

std::vector<double> ddpg_target(const Batch& batch, const Agent& agent) {
    require_algo(agent, {Algo::ddpg}, "ddpg_target");
    const num::Tensor u = agent.actor_output(0, batch.s_next, true);
    return bootstrap(batch, agent.config().gamma, agent.q_values(0, batch.s_next, u, true));
}

std::vector<double> td3_target(const Batch& batch, const Agent& agent, num::Rng& noise) {
    require_algo(agent, {Algo::td3}, "td3_target");
    const auto& cfg = agent.config();
    const num::Tensor eps = smoothing_noise(batch.size(), agent.action_dim(), cfg.target_noise, cfg.noise_clip, noise);
    const num::Tensor u = smoothed_target_action(agent, 0, batch.s_next, eps);
    const auto q1 = agent.q_values(0, batch.s_next, u, true);
    const auto q2 = agent.q_values(1, batch.s_next, u, true);
    std::vector<double> v(batch.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::min(q1[i], q2[i]);
    return bootstrap(batch, cfg.gamma, v);
}

DarcTargetDetail darc_target_detail(const Batch& batch, const Agent& agent, num::Rng& noise) {
    require_algo(agent, {Algo::darc}, "darc_target");
    const auto& cfg = agent.config();
    const num::Tensor eps = smoothing_noise(batch.size(), agent.action_dim(), cfg.target_noise, cfg.noise_clip, noise);
    const num::Tensor u1 = smoothed_target_action(agent, 0, batch.s_next, eps);
    const num::Tensor u2 = smoothed_target_action(agent, 1, batch.s_next, eps);
    const auto q11 = agent.q_values(0, batch.s_next, u1, true);
    const auto q21 = agent.q_values(1, batch.s_next, u1, true);
    const auto q12 = agent.q_values(0, batch.s_next, u2, true);
    const auto q22 = agent.q_values(1, batch.s_next, u2, true);

    DarcTargetDetail d;
    d.value.resize(batch.size());
    d.q.resize(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        d.q[i] = {q11[i], q21[i], q12[i], q22[i]};
        d.value[i] = std::max(std::min(q11[i], q21[i]), std::min(q12[i], q22[i]));
    }
    d.y = bootstrap(batch, cfg.gamma, d.value);
    return d;
}

std::vector<double> darc_target(const Batch& batch, const Agent& agent, num::Rng& noise) {
    return darc_target_detail(batch, agent, noise).y;
}

std::vector<double> sac_target(const Batch& batch, const Agent& agent, num::Rng& noise) {
    require_algo(agent, {Algo::sac}, "sac_target");
    const auto& cfg = agent.config();
    const std::size_t n = agent.action_dim();
    const Network& actor = agent.actors()[0];
    const num::Tensor out = num::mlp_predict(actor.online, actor.spec, agent.scaled_states(batch.s_next));
    num::Tensor u = num::Tensor::matrix(batch.size(), n);
    std::vector<double> log_prob(batch.size(), 0.0);
    for (std::size_t b = 0; b < batch.size(); ++b) {
        for (std::size_t d = 0; d < n; ++d) {
            const double eps = noise.normal();
            const double log_std = std::clamp(out(b, n + d), kLogStdMin, kLogStdMax);
            const double pre = out(b, d) + std::exp(log_std) * eps;
            u(b, d) = std::tanh(pre);
            log_prob[b] += tanh_gaussian_log_prob(eps, log_std, pre);
        }
    }
    const auto q1 = agent.q_values(0, batch.s_next, u, true);
    const auto q2 = agent.q_values(1, batch.s_next, u, true);
    std::vector<double> v(batch.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::min(q1[i], q2[i]) - cfg.sac_alpha * log_prob[i];
    return bootstrap(batch, cfg.gamma, v);
}

std::vector<double> compute_targets(const Batch& batch, const Agent& agent, num::Rng& noise) {
    switch (agent.config().algo) {
        case Algo::ddpg: return ddpg_target(batch, agent);
        case Algo::td3: return td3_target(batch, agent, noise);
        case Algo::sac: return sac_target(batch, agent, noise);
        case Algo::darc: return darc_target(batch, agent, noise);
    }
    throw std::logic_error("compute_targets: unknown algorithm");
}

}  // namespace darc::rl
