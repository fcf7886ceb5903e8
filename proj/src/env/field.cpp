#include "darc/env/field.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace darc::env {

double SaliencyField::sum() const { return std::accumulate(cells.begin(), cells.end(), 0.0); }

SaliencyField normalized(SaliencyField f) {
    for (double v : f.cells) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument("saliency field has a negative or non-finite cell");
        }
    }
    const double total = f.sum();
    if (!(total > 0.0)) throw std::invalid_argument("saliency field has zero mass");
    for (double& v : f.cells) v /= total;
    return f;
}

}  // namespace darc::env
