#pragma once

#include <array>
#include <vector>

#include "darc/num/rng.hpp"
#include "darc/rl/agent.hpp"
#include "darc/rl/replay_buffer.hpp"

namespace darc::rl {

// Bootstrap targets y = r + gamma * (1 - done) * V(s'). The noise source is
// passed explicitly so that two agents can be fed identical draws.

/// Target-policy smoothing noise: N(0, sigma^2) per entry, clipped to
/// [-clip, clip]; drawn row-major.
num::Tensor smoothing_noise(std::size_t rows, std::size_t cols, double sigma, double clip, num::Rng& rng);

/// Single target critic on the target actor's action; no smoothing.
std::vector<double> ddpg_target(const Batch& batch, const Agent& agent);

/// min over the two target critics at the smoothed target action.
std::vector<double> td3_target(const Batch& batch, const Agent& agent, num::Rng& noise);

struct DarcTargetDetail {
    std::vector<double> y;
    std::vector<double> value;  // V(s')
    /// Per sample: {Q'_1(s', a'_1), Q'_2(s', a'_1), Q'_1(s', a'_2), Q'_2(s', a'_2)}
    std::vector<std::array<double, 4>> q;
};

/// V(s') = max_j min_i Q'_i(s', a'_j), with a'_j the smoothed action of
/// target actor j. Both actors share one smoothing-noise draw.
DarcTargetDetail darc_target_detail(const Batch& batch, const Agent& agent, num::Rng& noise);
std::vector<double> darc_target(const Batch& batch, const Agent& agent, num::Rng& noise);

/// Soft value min_i Q'_i(s', a') - alpha * log pi(a'|s') with a' sampled from
/// the online tanh-Gaussian policy by reparameterization.
std::vector<double> sac_target(const Batch& batch, const Agent& agent, num::Rng& noise);

/// Dispatches on agent.config().algo.
std::vector<double> compute_targets(const Batch& batch, const Agent& agent, num::Rng& noise);

}  // namespace darc::rl
