#include "darc/env/attention.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace darc::env {

FoveateResult foveate(const SaliencyField& field, Point fixation, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("foveate: sigma must be > 0");
    FoveateResult out{field, false};
    const double inv_two_var = 1.0 / (2.0 * sigma * sigma);
    double total = 0.0;
    for (std::size_t r = 0; r < field.height; ++r) {
        const double dy = field.center_y(r) - fixation.y;
        for (std::size_t c = 0; c < field.width; ++c) {
            const double dx = field.center_x(c) - fixation.x;
            double& v = out.field.at(r, c);
            v = field.at(r, c) * std::exp(-(dx * dx + dy * dy) * inv_two_var);
            total += v;
        }
    }
    if (!(total > 0.0) || !std::isfinite(total)) {
        const double u = 1.0 / static_cast<double>(field.cells.size());
        for (double& v : out.field.cells) v = u;
        out.degenerate = true;
        return out;
    }
    for (double& v : out.field.cells) v /= total;
    return out;
}

SaliencyField combine_attention(const SaliencyField& bottom_up, const SaliencyField& top_down, double rho) {
    if (!(rho >= 0.0 && rho <= 1.0)) {
        throw std::invalid_argument("combine_attention: rho must lie in [0, 1], got " + std::to_string(rho));
    }
    if (!bottom_up.same_grid(top_down)) throw std::invalid_argument("combine_attention: grid sizes differ");
    SaliencyField out = bottom_up;
    double total = 0.0;
    for (std::size_t i = 0; i < out.cells.size(); ++i) {
        out.cells[i] = rho * top_down.cells[i] + (1.0 - rho) * bottom_up.cells[i];
        total += out.cells[i];
    }
    if (!(total > 0.0)) throw std::invalid_argument("combine_attention: inputs have no mass");
    for (double& v : out.cells) v /= total;
    return out;
}

std::vector<double> pool_features(const SaliencyField& field, std::size_t out_h, std::size_t out_w) {
    if (out_h == 0 || out_w == 0 || field.height % out_h != 0 || field.width % out_w != 0) {
        throw std::invalid_argument("pool_features: " + std::to_string(field.height) + "x" +
                                    std::to_string(field.width) + " grid is not divisible into " +
                                    std::to_string(out_h) + "x" + std::to_string(out_w) + " blocks");
    }
    const std::size_t bh = field.height / out_h, bw = field.width / out_w;
    const double inv = 1.0 / static_cast<double>(bh * bw);
    std::vector<double> out(out_h * out_w, 0.0);
    for (std::size_t r = 0; r < field.height; ++r) {
        for (std::size_t c = 0; c < field.width; ++c) out[(r / bh) * out_w + c / bw] += field.at(r, c);
    }
    for (double& v : out) v *= inv;
    return out;
}

}  // namespace darc::env
