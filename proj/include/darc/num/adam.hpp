#pragma once

#include <cstdint>

#include "darc/num/tensor.hpp"

namespace darc::num {

struct AdamConfig {
    double lr = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    AdamConfig config;
    ParamSet m;
    ParamSet v;
    std::uint64_t t = 0;

    bool operator==(const AdamState& o) const {
        return m == o.m && v == o.v && t == o.t && config.lr == o.config.lr &&
               config.beta1 == o.config.beta1 && config.beta2 == o.config.beta2 &&
               config.eps == o.config.eps;
    }
};

AdamState make_adam_state(const ParamSet& params, AdamConfig config = {});

/// One bias-corrected Adam step (Kingma & Ba). Increments state.t.
void adam_step(ParamSet& params, const ParamSet& grads, AdamState& state);

}  // namespace darc::num
