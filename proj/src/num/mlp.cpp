#include "darc/num/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace darc::num {

namespace {

void apply_activation(Activation act, Tensor& t) {
    switch (act) {
        case Activation::identity:
            return;
        case Activation::relu:
            for (double& v : t.data()) v = v > 0.0 ? v : 0.0;
            return;
        case Activation::tanh:
            for (double& v : t.data()) v = std::tanh(v);
            return;
    }
}

// Multiplies `grad` in place by the activation derivative. `pre` is the
// preactivation, `post` the activated value.
void apply_activation_grad(Activation act, const Tensor& pre, const Tensor& post, Tensor& grad) {
    auto g = grad.data();
    switch (act) {
        case Activation::identity:
            return;
        case Activation::relu: {
            auto z = pre.data();
            for (std::size_t i = 0; i < g.size(); ++i) {
                if (!(z[i] > 0.0)) g[i] = 0.0;
            }
            return;
        }
        case Activation::tanh: {
            auto y = post.data();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] *= 1.0 - y[i] * y[i];
            return;
        }
    }
}

Tensor affine(const Tensor& x, const Tensor& w, const Tensor& b) {
    Tensor z = matmul(x, w);
    auto bias = b.data();
    for (std::size_t r = 0; r < z.rows(); ++r) {
        auto row = z.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) row[c] += bias[c];
    }
    return z;
}

void check_input(const ParamSet& params, const MlpSpec& spec, const Tensor& x) {
    if (x.rank() != 2 || x.cols() != spec.input_dim) {
        throw std::invalid_argument("mlp_forward: expected input shape [batch, " +
                                    std::to_string(spec.input_dim) + "], got " + shape_string(x.shape()));
    }
    if (params.size() != 2 * spec.layer_count()) {
        throw std::invalid_argument("mlp_forward: parameter count " + std::to_string(params.size()) +
                                    " does not match spec with " + std::to_string(spec.layer_count()) +
                                    " layers");
    }
}

}  // namespace

std::string to_string(Activation a) {
    switch (a) {
        case Activation::identity: return "identity";
        case Activation::relu: return "relu";
        case Activation::tanh: return "tanh";
    }
    return "?";
}

void MlpSpec::validate() const {
    if (input_dim == 0 || output_dim == 0) throw std::invalid_argument("MlpSpec: dims must be >= 1");
    for (auto h : hidden_dims) {
        if (h == 0) throw std::invalid_argument("MlpSpec: hidden dims must be >= 1");
    }
    if (hidden_activation != Activation::relu) {
        throw std::invalid_argument("MlpSpec: hidden activation must be relu");
    }
}

ParamSet init_params(const MlpSpec& spec, Rng& rng) {
    spec.validate();
    ParamSet p;
    std::size_t fan_in = spec.input_dim;
    for (std::size_t l = 0; l < spec.layer_count(); ++l) {
        const std::size_t fan_out = l < spec.hidden_dims.size() ? spec.hidden_dims[l] : spec.output_dim;
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        Tensor w = Tensor::matrix(fan_in, fan_out);
        for (double& v : w.data()) v = rng.uniform(-bound, bound);
        p.entries.push_back({"W" + std::to_string(l), std::move(w)});
        p.entries.push_back({"b" + std::to_string(l), Tensor({fan_out}, 0.0)});
        fan_in = fan_out;
    }
    return p;
}

ParamSet init_params(const MlpSpec& spec, std::uint64_t seed) {
    Rng rng(seed);
    return init_params(spec, rng);
}

ForwardResult mlp_forward(const ParamSet& params, const MlpSpec& spec, const Tensor& x) {
    check_input(params, spec, x);
    ForwardResult out;
    Tape& tape = out.tape;
    tape.params = &params;
    tape.spec = spec;
    Tensor h = x;
    for (std::size_t l = 0; l < spec.layer_count(); ++l) {
        Tensor z = affine(h, params[2 * l], params[2 * l + 1]);
        tape.layer_inputs.push_back(std::move(h));
        h = z;
        const bool last = l + 1 == spec.layer_count();
        apply_activation(last ? spec.output_activation : spec.hidden_activation, h);
        tape.preactivations.push_back(std::move(z));
    }
    tape.output = h;
    out.y = std::move(h);
    return out;
}

Tensor mlp_predict(const ParamSet& params, const MlpSpec& spec, const Tensor& x) {
    check_input(params, spec, x);
    Tensor h = x;
    for (std::size_t l = 0; l < spec.layer_count(); ++l) {
        h = affine(h, params[2 * l], params[2 * l + 1]);
        const bool last = l + 1 == spec.layer_count();
        apply_activation(last ? spec.output_activation : spec.hidden_activation, h);
    }
    return h;
}

Gradients backward(const Tape& tape, const Tensor& upstream) {
    if (tape.params == nullptr) throw std::invalid_argument("backward: empty tape");
    if (upstream.shape() != tape.output.shape()) {
        throw std::invalid_argument("backward: upstream shape " + shape_string(upstream.shape()) +
                                    " does not match output " + shape_string(tape.output.shape()));
    }
    const ParamSet& params = *tape.params;
    const std::size_t layers = tape.spec.layer_count();
    Gradients g;
    g.params = zeros_like(params);

    Tensor grad = upstream;
    apply_activation_grad(tape.spec.output_activation, tape.preactivations.back(), tape.output, grad);
    for (std::size_t l = layers; l-- > 0;) {
        // grad holds dLoss/dz for layer l
        g.params[2 * l] = matmul_transposed_a(tape.layer_inputs[l], grad);
        auto db = g.params[2 * l + 1].data();
        for (std::size_t r = 0; r < grad.rows(); ++r) {
            auto row = grad.row(r);
            for (std::size_t c = 0; c < row.size(); ++c) db[c] += row[c];
        }
        Tensor down = matmul_transposed_b(grad, params[2 * l]);
        if (l > 0) {
            apply_activation_grad(tape.spec.hidden_activation, tape.preactivations[l - 1],
                                  tape.layer_inputs[l], down);
        }
        grad = std::move(down);
    }
    g.input = std::move(grad);
    return g;
}

namespace {

double weighted_sum(const Tensor& y, const Tensor& w) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += y[i] * w[i];
    return s;
}

bool clear_of_kinks(const Tape& tape) {
    for (std::size_t l = 0; l + 1 < tape.preactivations.size(); ++l) {
        for (double z : tape.preactivations[l].data()) {
            if (std::abs(z) <= kReluKinkMargin) return false;
        }
    }
    return true;
}

}  // namespace

double gradient_check(const MlpSpec& spec, std::uint64_t seed, std::size_t probes) {
    if (probes == 0) throw std::invalid_argument("gradient_check: probes must be >= 1");
    spec.validate();
    Rng rng(seed);
    ParamSet params = init_params(spec, rng);
    for (std::size_t l = 0; l < spec.layer_count(); ++l) {
        for (double& b : params[2 * l + 1].data()) b = rng.uniform(-0.1, 0.1);
    }

    constexpr std::size_t batch = 4;
    constexpr int max_attempts = 1000;
    Tensor x = Tensor::matrix(batch, spec.input_dim);
    ForwardResult fwd;
    for (int attempt = 0;; ++attempt) {
        for (double& v : x.data()) v = rng.normal();
        fwd = mlp_forward(params, spec, x);
        if (clear_of_kinks(fwd.tape)) break;
        if (attempt == max_attempts) {
            throw std::runtime_error("gradient_check: no kink-free input found");
        }
    }
    Tensor upstream(fwd.y.shape());
    for (double& v : upstream.data()) v = rng.normal();
    const Gradients analytic = backward(fwd.tape, upstream);

    const std::size_t param_scalars = params.scalar_count();
    const std::size_t total = param_scalars + x.size();
    double worst = 0.0;
    for (std::size_t p = 0; p < probes; ++p) {
        std::size_t flat = rng.index(total);
        double* slot = nullptr;
        double grad = 0.0;
        if (flat < param_scalars) {
            for (std::size_t e = 0; e < params.size(); ++e) {
                if (flat < params[e].size()) {
                    slot = &params[e][flat];
                    grad = analytic.params[e][flat];
                    break;
                }
                flat -= params[e].size();
            }
        } else {
            flat -= param_scalars;
            slot = &x[flat];
            grad = analytic.input[flat];
        }
        const double saved = *slot;
        *slot = saved + kGradCheckStep;
        const double up = weighted_sum(mlp_predict(params, spec, x), upstream);
        *slot = saved - kGradCheckStep;
        const double down = weighted_sum(mlp_predict(params, spec, x), upstream);
        *slot = saved;
        const double numeric = (up - down) / (2.0 * kGradCheckStep);
        const double scale = std::max({std::abs(grad), std::abs(numeric), 1e-6});
        worst = std::max(worst, std::abs(grad - numeric) / scale);
    }
    return worst;
}

}  // namespace darc::num
