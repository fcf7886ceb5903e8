#pragma once

#include <cstddef>
#include <vector>

#include "darc/env/field.hpp"

namespace darc::env {

struct FoveateResult {
    SaliencyField field;
    /// Set when the weighted field had no mass (e.g. Gaussian underflow far
    /// from all support); the field is then uniform.
    bool degenerate = false;
};

/// Top-down attention: weights a normalized field by an isotropic Gaussian
/// acuity falloff of width `sigma` centered at `fixation`, then renormalizes.
FoveateResult foveate(const SaliencyField& field, Point fixation, double sigma);

/// rho * top_down + (1 - rho) * bottom_up, renormalized.
/// Throws std::invalid_argument if rho is outside [0, 1] or grids differ.
SaliencyField combine_attention(const SaliencyField& bottom_up, const SaliencyField& top_down, double rho);

/// Block-mean pooling to out_h x out_w cells (row-major). The grid must be
/// divisible by the output dims.
std::vector<double> pool_features(const SaliencyField& field, std::size_t out_h, std::size_t out_w);

}  // namespace darc::env
