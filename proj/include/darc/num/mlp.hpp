#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "darc/num/rng.hpp"
#include "darc/num/tensor.hpp"

namespace darc::num {

enum class Activation { identity, relu, tanh };

std::string to_string(Activation a);

struct MlpSpec {
    std::size_t input_dim = 1;
    std::vector<std::size_t> hidden_dims = {64, 64};
    std::size_t output_dim = 1;
    Activation hidden_activation = Activation::relu;
    Activation output_activation = Activation::identity;

    std::size_t layer_count() const { return hidden_dims.size() + 1; }
    /// Throws std::invalid_argument on zero dims or a non-relu hidden activation.
    void validate() const;

    bool operator==(const MlpSpec&) const = default;
};

/// Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], biases zero.
/// Layer l stores W<l> with shape [fan_in, fan_out] and b<l> with shape [fan_out].
ParamSet init_params(const MlpSpec& spec, std::uint64_t seed);
ParamSet init_params(const MlpSpec& spec, Rng& rng);

/// Record of one forward pass. Holds a pointer to the parameters used, so
/// the ParamSet must outlive the tape and must not change before backward().
struct Tape {
    const ParamSet* params = nullptr;
    MlpSpec spec;
    std::vector<Tensor> layer_inputs;  // input to each affine layer
    std::vector<Tensor> preactivations;
    Tensor output;
};

struct ForwardResult {
    Tensor y;
    Tape tape;
};

ForwardResult mlp_forward(const ParamSet& params, const MlpSpec& spec, const Tensor& x);
/// Forward pass without recording a tape.
Tensor mlp_predict(const ParamSet& params, const MlpSpec& spec, const Tensor& x);

struct Gradients {
    ParamSet params;
    Tensor input;
};

/// Reverse sweep over a tape. `upstream` is dLoss/dy with the output's shape.
Gradients backward(const Tape& tape, const Tensor& upstream);

/// Central finite-difference check (h = 1e-5) of backward() on a random
/// network and input. Returns the largest relative error over `probes`
/// randomly chosen parameter and input coordinates.
double gradient_check(const MlpSpec& spec, std::uint64_t seed, std::size_t probes);

inline constexpr double kGradCheckStep = 1e-5;
inline constexpr double kReluKinkMargin = 1e-3;

}  // namespace darc::num
