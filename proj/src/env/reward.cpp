#include "darc/env/reward.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace darc::env {

std::string to_string(FixationWindow w) {
    return w == FixationWindow::after_accident ? "after_accident" : "before_accident";
}

FixationWindow parse_fixation_window(const std::string& s) {
    if (s == "after_accident") return FixationWindow::after_accident;
    if (s == "before_accident") return FixationWindow::before_accident;
    throw std::invalid_argument("fixation window must be after_accident or before_accident, got '" + s + "'");
}

bool fixation_window_active(double t, std::optional<double> t_a, FixationWindow window) {
    if (window == FixationWindow::after_accident) return t_a.has_value() && t > *t_a;
    return !t_a.has_value() || t <= *t_a;
}

double accident_weight(double t, double t_a) {
    if (!(t >= 0.0)) throw std::invalid_argument("accident_weight: t must be >= 0");
    if (!(t_a > 0.0)) throw std::invalid_argument("accident_weight: t_a must be > 0");
    const double d = std::max(0.0, t_a - t);
    if (d == 0.0) return 0.0;
    if (t_a < 1.0) return std::expm1(d) / std::expm1(t_a);
    // Scaled form that stays finite for large t_a:
    // e^{d - t_a} (1 - e^{-d}) / (1 - e^{-t_a})
    return std::exp(d - t_a) * (std::expm1(-d) / std::expm1(-t_a));
}

double reward_accident(double a, double a_0, bool y, double t, std::optional<double> t_a) {
    if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("reward_accident: score outside [0, 1]");
    if (y && !t_a) throw std::invalid_argument("reward_accident: positive episode without accident time");
    const bool alarm = a > a_0;
    if (alarm != y) return 0.0;
    return y ? accident_weight(t, *t_a) : 1.0;
}

double reward_fixation(Point p_hat, Point p, double t, std::optional<double> t_a, double eta,
                       FixationWindow window) {
    if (!(eta > 0.0)) throw std::invalid_argument("reward_fixation: eta must be > 0");
    if (!fixation_window_active(t, t_a, window)) return 0.0;
    return std::exp(-squared_distance(p_hat, p) / eta);
}

}  // namespace darc::env
