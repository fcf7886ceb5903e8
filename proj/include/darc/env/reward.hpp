#pragma once

#include <optional>
#include <string>

#include "darc/env/field.hpp"

namespace darc::env {

/// Which frames the fixation reward (and fixation MSE) covers.
/// after_accident is the indicator 1[t > t_a]; before_accident is 1[t <= t_a].
/// Episodes without an accident count as "never reached": no frame is after
/// it, every frame is before it.
enum class FixationWindow { after_accident, before_accident };

std::string to_string(FixationWindow w);
FixationWindow parse_fixation_window(const std::string& s);

bool fixation_window_active(double t, std::optional<double> t_a, FixationWindow window);

/// Earliness weight: (e^{max(0, t_a - t)} - 1) / (e^{t_a} - 1).
/// Equals 1 at t = 0 and 0 for every t >= t_a. Requires t >= 0, t_a > 0.
double accident_weight(double t, double t_a);

/// w_t * XNOR(1[a > a_0], y). Negative episodes (y = 0, no t_a) use w = 1.
/// Throws std::invalid_argument when y = 1 and t_a is absent, or a is outside [0, 1].
double reward_accident(double a, double a_0, bool y, double t, std::optional<double> t_a);

/// window(t, t_a) * exp(-|p_hat - p|^2 / eta).
double reward_fixation(Point p_hat, Point p, double t, std::optional<double> t_a, double eta,
                       FixationWindow window = FixationWindow::after_accident);

}  // namespace darc::env
