#include "darc/num/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace darc::num {

AdamState make_adam_state(const ParamSet& params, AdamConfig config) {
    AdamState s;
    s.config = config;
    s.m = zeros_like(params);
    s.v = zeros_like(params);
    return s;
}

void adam_step(ParamSet& params, const ParamSet& grads, AdamState& state) {
    if (!params.same_layout(grads) || !params.same_layout(state.m) || !params.same_layout(state.v)) {
        throw std::invalid_argument("adam_step: parameter, gradient and moment layouts differ");
    }
    const AdamConfig& c = state.config;
    state.t += 1;
    const double t = static_cast<double>(state.t);
    const double correction1 = 1.0 - std::pow(c.beta1, t);
    const double correction2 = 1.0 - std::pow(c.beta2, t);
    for (std::size_t e = 0; e < params.size(); ++e) {
        auto p = params[e].data();
        auto g = grads[e].data();
        auto m = state.m[e].data();
        auto v = state.v[e].data();
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
            v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
            const double m_hat = m[i] / correction1;
            const double v_hat = v[i] / correction2;
            p[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
        }
    }
}

}  // namespace darc::num
