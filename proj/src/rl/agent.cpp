#include "darc/rl/agent.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "darc/rl/targets.hpp"

namespace darc::rl {

namespace {

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

Network make_network(const num::MlpSpec& spec, num::Rng& rng, double lr) {
    Network n;
    n.spec = spec;
    n.online = num::init_params(spec, rng);
    n.target = n.online;
    n.adam = num::make_adam_state(n.online, {.lr = lr});
    return n;
}

num::Tensor squashed_actions(const num::Tensor& a) {
    num::Tensor u = a;
    for (double& v : u.data()) v = 2.0 * v - 1.0;
    return u;
}

double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

}  // namespace

double tanh_gaussian_log_prob(double eps, double log_std, double pre_squash) {
    // log(1 - tanh(x)^2) = 2 (log 2 - x - softplus(-2x))
    const double log_det = 2.0 * (std::numbers::ln2 - pre_squash - softplus(-2.0 * pre_squash));
    return -0.5 * eps * eps - log_std - 0.5 * std::log(2.0 * std::numbers::pi) - log_det;
}

std::vector<double> regularized_critic_losses(std::span<const double> q1, std::span<const double> q2,
                                              std::span<const double> y, double nu) {
    if (q1.size() != y.size() || (!q2.empty() && q2.size() != y.size()) || y.empty()) {
        throw std::invalid_argument("regularized_critic_losses: size mismatch");
    }
    const double n = static_cast<double>(y.size());
    auto mse = [&](std::span<const double> q) {
        double s = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) s += (q[i] - y[i]) * (q[i] - y[i]);
        return s / n;
    };
    if (q2.empty()) return {mse(q1)};
    double gap = 0.0;
    for (std::size_t i = 0; i < q1.size(); ++i) gap += (q1[i] - q2[i]) * (q1[i] - q2[i]);
    gap /= n;
    return {mse(q1) + nu * gap, mse(q2) + nu * gap};
}

Agent::Agent(AgentConfig cfg, std::size_t obs_dim, std::size_t action_dim, std::uint64_t seed)
    : cfg_(std::move(cfg)), obs_dim_(obs_dim), action_dim_(action_dim), rng_(num::mix_seed(seed)) {
    cfg_.validate();
    if (obs_dim == 0 || action_dim == 0) throw std::invalid_argument("Agent: dims must be >= 1");
    num::Rng init(seed);

    num::MlpSpec actor_spec;
    actor_spec.input_dim = obs_dim;
    actor_spec.hidden_dims = cfg_.hidden_dims;
    if (cfg_.deterministic_policy()) {
        actor_spec.output_dim = action_dim;
        actor_spec.output_activation = num::Activation::tanh;
    } else {
        actor_spec.output_dim = 2 * action_dim;
        actor_spec.output_activation = num::Activation::identity;
    }
    num::MlpSpec critic_spec;
    critic_spec.input_dim = obs_dim + action_dim;
    critic_spec.hidden_dims = cfg_.hidden_dims;
    critic_spec.output_dim = 1;

    for (std::size_t i = 0; i < cfg_.actor_count(); ++i) actors_.push_back(make_network(actor_spec, init, cfg_.actor_lr));
    for (std::size_t i = 0; i < cfg_.critic_count(); ++i) {
        critics_.push_back(make_network(critic_spec, init, cfg_.critic_lr));
    }
}

void Agent::set_counters(std::uint64_t env_steps, std::uint64_t critic_updates, std::uint64_t actor_updates) {
    env_steps_ = env_steps;
    critic_updates_ = critic_updates;
    actor_updates_ = actor_updates;
}

num::Tensor Agent::scaled_states(const num::Tensor& s) const {
    if (s.rank() != 2 || s.cols() != obs_dim_) {
        throw std::invalid_argument("Agent: expected states of shape [n, " + std::to_string(obs_dim_) + "], got " +
                                    num::shape_string(s.shape()));
    }
    num::Tensor out = s;
    if (cfg_.input_scale != 1.0) {
        for (double& v : out.data()) v *= cfg_.input_scale;
    }
    return out;
}

num::Tensor Agent::actor_output(std::size_t actor, const num::Tensor& states, bool use_target) const {
    const Network& net = actors_.at(actor);
    num::Tensor out = num::mlp_predict(use_target ? net.target : net.online, net.spec, scaled_states(states));
    if (cfg_.deterministic_policy()) return out;
    num::Tensor u = num::Tensor::matrix(out.rows(), action_dim_);
    for (std::size_t r = 0; r < out.rows(); ++r) {
        for (std::size_t d = 0; d < action_dim_; ++d) u(r, d) = std::tanh(out(r, d));
    }
    return u;
}

std::vector<double> Agent::q_values(std::size_t critic, const num::Tensor& states, const num::Tensor& u,
                                    bool use_target) const {
    const Network& net = critics_.at(critic);
    const num::Tensor q =
        num::mlp_predict(use_target ? net.target : net.online, net.spec, num::hconcat(scaled_states(states), u));
    return {q.data().begin(), q.data().end()};
}

std::vector<double> Agent::random_action() {
    std::vector<double> a(action_dim_);
    for (double& v : a) v = rng_.uniform();
    return a;
}

std::vector<double> Agent::select_action(std::span<const double> obs, Mode mode) {
    if (obs.size() != obs_dim_) {
        throw std::invalid_argument("select_action: observation has " + std::to_string(obs.size()) +
                                    " features, agent expects " + std::to_string(obs_dim_));
    }
    const num::Tensor s({1, obs_dim_}, std::vector<double>(obs.begin(), obs.end()));
    std::vector<double> u(action_dim_);

    if (cfg_.algo == Algo::sac) {
        const Network& net = actors_[0];
        const num::Tensor out = num::mlp_predict(net.online, net.spec, scaled_states(s));
        for (std::size_t d = 0; d < action_dim_; ++d) {
            double pre = out(0, d);
            if (mode == Mode::train) {
                const double log_std = std::clamp(out(0, action_dim_ + d), kLogStdMin, kLogStdMax);
                pre += std::exp(log_std) * rng_.normal();
            }
            u[d] = std::tanh(pre);
        }
    } else {
        std::size_t chosen = 0;
        num::Tensor best = actor_output(0, s, false);
        if (cfg_.algo == Algo::darc) {
            // act with whichever actor the online critics rate higher
            const num::Tensor second = actor_output(1, s, false);
            const double v1 = 0.5 * (q_values(0, s, best, false)[0] + q_values(1, s, best, false)[0]);
            const double v2 = 0.5 * (q_values(0, s, second, false)[0] + q_values(1, s, second, false)[0]);
            if (v2 > v1) {
                chosen = 1;
                best = second;
            }
        }
        (void)chosen;
        for (std::size_t d = 0; d < action_dim_; ++d) {
            u[d] = best[d];
            if (mode == Mode::train) u[d] = std::clamp(u[d] + cfg_.exploration_noise * rng_.normal(), -1.0, 1.0);
        }
    }
    std::vector<double> a(action_dim_);
    for (std::size_t d = 0; d < action_dim_; ++d) a[d] = std::clamp(0.5 * (u[d] + 1.0), 0.0, 1.0);
    return a;
}

std::vector<double> Agent::critic_update(const Batch& batch) {
    const std::vector<double> y = compute_targets(batch, *this, rng_);
    const num::Tensor x = num::hconcat(scaled_states(batch.s), squashed_actions(batch.action));
    const std::size_t n = batch.size();

    std::vector<num::ForwardResult> fwd;
    std::vector<std::vector<double>> q;
    for (auto& c : critics_) {
        fwd.push_back(num::mlp_forward(c.online, c.spec, x));
        q.emplace_back(fwd.back().y.data().begin(), fwd.back().y.data().end());
    }
    const bool regularized = cfg_.algo == Algo::darc;
    const double nu = regularized ? cfg_.nu : 0.0;
    const std::vector<double> losses =
        regularized_critic_losses(q[0], q.size() > 1 ? std::span<const double>(q[1]) : std::span<const double>{}, y, nu);

    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < critics_.size(); ++i) {
        num::Tensor upstream = num::Tensor::matrix(n, 1);
        for (std::size_t b = 0; b < n; ++b) {
            double g = 2.0 * (q[i][b] - y[b]) * inv_n;
            if (regularized) g += 2.0 * nu * (q[i][b] - q[1 - i][b]) * inv_n;
            upstream[b] = g;
        }
        const num::Gradients grads = num::backward(fwd[i].tape, upstream);
        num::adam_step(critics_[i].online, grads.params, critics_[i].adam);
    }
    ++critic_updates_;
    return losses;
}

std::vector<double> Agent::deterministic_actor_update(std::size_t actor, std::size_t critic, const num::Tensor& s) {
    Network& a = actors_[actor];
    const Network& c = critics_[critic];
    const num::Tensor scaled = scaled_states(s);
    const std::size_t n = s.rows();
    const num::ForwardResult actor_fwd = num::mlp_forward(a.online, a.spec, scaled);
    const num::ForwardResult critic_fwd = num::mlp_forward(c.online, c.spec, num::hconcat(scaled, actor_fwd.y));
    const double loss = -mean_of(critic_fwd.y.data());

    const num::Tensor upstream = num::Tensor::matrix(n, 1, -1.0 / static_cast<double>(n));
    const num::Gradients critic_grads = num::backward(critic_fwd.tape, upstream);
    const num::Tensor du = num::column_slice(critic_grads.input, obs_dim_, action_dim_);
    const num::Gradients actor_grads = num::backward(actor_fwd.tape, du);
    num::adam_step(a.online, actor_grads.params, a.adam);
    return {loss};
}

SacActorObjective sac_actor_objective(const Agent& agent, const num::ParamSet& actor_params, const num::Tensor& states,
                                      const num::Tensor& eps) {
    const auto& cfg = agent.config();
    const std::size_t n = states.rows(), k = agent.action_dim(), obs = agent.obs_dim();
    if (eps.rows() != n || eps.cols() != k) throw std::invalid_argument("sac_actor_objective: noise shape mismatch");
    const Network& actor = agent.actors()[0];
    const num::Tensor scaled = agent.scaled_states(states);
    const num::ForwardResult fwd = num::mlp_forward(actor_params, actor.spec, scaled);

    num::Tensor u = num::Tensor::matrix(n, k);
    num::Tensor std_dev = num::Tensor::matrix(n, k);
    std::vector<bool> clamped(n * k, false);
    std::vector<double> log_prob(n, 0.0);
    for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t d = 0; d < k; ++d) {
            const double raw = fwd.y(b, k + d);
            const double log_std = std::clamp(raw, kLogStdMin, kLogStdMax);
            clamped[b * k + d] = raw != log_std;
            std_dev(b, d) = std::exp(log_std);
            const double pre = fwd.y(b, d) + std_dev(b, d) * eps(b, d);
            u(b, d) = std::tanh(pre);
            log_prob[b] += tanh_gaussian_log_prob(eps(b, d), log_std, pre);
        }
    }

    const num::Tensor x = num::hconcat(scaled, u);
    const auto& critics = agent.critics();
    const num::ForwardResult q1 = num::mlp_forward(critics[0].online, critics[0].spec, x);
    const num::ForwardResult q2 = num::mlp_forward(critics[1].online, critics[1].spec, x);

    const double inv_n = 1.0 / static_cast<double>(n);
    SacActorObjective out;
    num::Tensor up1 = num::Tensor::matrix(n, 1), up2 = num::Tensor::matrix(n, 1);
    for (std::size_t b = 0; b < n; ++b) {
        const bool first = q1.y[b] <= q2.y[b];
        out.loss += (cfg.sac_alpha * log_prob[b] - (first ? q1.y[b] : q2.y[b])) * inv_n;
        (first ? up1 : up2)[b] = -inv_n;
    }
    const num::Tensor du1 = num::column_slice(num::backward(q1.tape, up1).input, obs, k);
    const num::Tensor du2 = num::column_slice(num::backward(q2.tape, up2).input, obs, k);

    num::Tensor upstream = num::Tensor::matrix(n, 2 * k);
    for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t d = 0; d < k; ++d) {
            const double a = u(b, d);
            // d/dpre of -log(1 - tanh^2) is 2 tanh
            const double dpre = (du1(b, d) + du2(b, d)) * (1.0 - a * a) + cfg.sac_alpha * inv_n * 2.0 * a;
            upstream(b, d) = dpre;
            upstream(b, k + d) =
                clamped[b * k + d] ? 0.0 : dpre * std_dev(b, d) * eps(b, d) - cfg.sac_alpha * inv_n;
        }
    }
    out.grads = num::backward(fwd.tape, upstream).params;
    return out;
}

double Agent::sac_actor_update(const num::Tensor& s) {
    num::Tensor eps = num::Tensor::matrix(s.rows(), action_dim_);
    for (double& v : eps.data()) v = rng_.normal();
    SacActorObjective obj = sac_actor_objective(*this, actors_[0].online, s, eps);
    num::adam_step(actors_[0].online, obj.grads, actors_[0].adam);
    return obj.loss;
}

std::vector<double> Agent::actor_update(const Batch& batch) {
    std::vector<double> losses;
    switch (cfg_.algo) {
        case Algo::ddpg:
        case Algo::td3:
            losses = deterministic_actor_update(0, 0, batch.s);
            break;
        case Algo::darc:
            // each actor is paired with its own critic
            losses = deterministic_actor_update(0, 0, batch.s);
            losses.push_back(deterministic_actor_update(1, 1, batch.s)[0]);
            break;
        case Algo::sac:
            losses = {sac_actor_update(batch.s)};
            break;
    }
    for (auto& net : actors_) num::soft_update_inplace(net.target, net.online, cfg_.tau);
    for (auto& net : critics_) num::soft_update_inplace(net.target, net.online, cfg_.tau);
    ++actor_updates_;
    return losses;
}

TrainLog Agent::train_on_batch(const Batch& batch) {
    TrainLog log;
    log.critic_losses = critic_update(batch);
    if (critic_updates_ % cfg_.effective_policy_delay() == 0) log.actor_losses = actor_update(batch);
    return log;
}

}  // namespace darc::rl
