#include "darc/env/episode.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "darc/num/rng.hpp"

namespace darc::env {

std::string to_string(TimeUnit u) { return u == TimeUnit::seconds ? "seconds" : "frames"; }

TimeUnit parse_time_unit(const std::string& s) {
    if (s == "seconds") return TimeUnit::seconds;
    if (s == "frames") return TimeUnit::frames;
    throw std::invalid_argument("time unit must be seconds or frames, got '" + s + "'");
}

namespace {

void require(bool ok, const std::string& key, const std::string& rule) {
    if (!ok) throw std::invalid_argument(key + ": " + rule);
}

}  // namespace

void EnvConfig::validate() const {
    require(a0 > 0.0 && a0 < 1.0, "a0", "must lie in (0, 1)");
    require(eta > 0.0, "eta", "must be > 0");
    require(rho >= 0.0 && rho <= 1.0, "rho", "must lie in [0, 1]");
    require(sigma_f > 0.0, "sigma_f", "must be > 0");
    require(stack >= 1, "stack", "must be >= 1");
    require(grid_h >= 1 && grid_w >= 1, "grid", "dims must be >= 1");
    require(pool_h >= 1 && pool_w >= 1, "pool", "dims must be >= 1");
    require(grid_h % pool_h == 0 && grid_w % pool_w == 0, "pool", "must divide the grid dims");
    require(episode_length >= 2, "episode_length", "must be >= 2");
    require(accident_prob >= 0.0 && accident_prob <= 1.0, "accident_prob", "must lie in [0, 1]");
    require(ta_min_frac > 0.0 && ta_min_frac <= ta_max_frac && ta_max_frac < 1.0, "ta_range",
            "must satisfy 0 < ta_min_frac <= ta_max_frac < 1");
    require(fps > 0.0, "fps", "must be > 0");
}

void Episode::validate() const {
    if (frames.empty()) throw std::invalid_argument("episode has no frames");
    if (fixation_track.size() != frames.size()) {
        throw std::invalid_argument("episode fixation track length differs from frame count");
    }
    if (!(fps > 0.0)) throw std::invalid_argument("episode fps must be > 0");
    if (y != t_a.has_value()) throw std::invalid_argument("episode accident time present iff label is 1");
    if (t_a && (*t_a == 0 || *t_a >= frames.size())) {
        throw std::invalid_argument("episode accident frame " + std::to_string(*t_a) + " outside (0, " +
                                    std::to_string(frames.size()) + ")");
    }
    for (std::size_t t = 0; t < frames.size(); ++t) {
        const auto& f = frames[t];
        if (!f.same_grid(frames[0]) || f.cells.size() != f.height * f.width || f.cells.empty()) {
            throw std::invalid_argument("frame " + std::to_string(t) + " has an inconsistent grid");
        }
        for (double v : f.cells) {
            if (!(v >= 0.0) || !std::isfinite(v)) {
                throw std::invalid_argument("frame " + std::to_string(t) + " has a negative or non-finite cell");
            }
        }
        if (!in_unit_square(fixation_track[t])) {
            throw std::invalid_argument("frame " + std::to_string(t) + " fixation outside [0,1]^2");
        }
    }
}

std::optional<std::size_t> blob_onset(const Episode& ep) {
    if (!ep.t_a) return std::nullopt;
    return *ep.t_a > kBlobRampFrames ? *ep.t_a - kBlobRampFrames : 0;
}

double reward_time(double frame, double fps, TimeUnit unit) {
    return unit == TimeUnit::seconds ? frame / fps : frame;
}

namespace {

struct Distractor {
    double cx, cy, radius, phase, speed, amplitude;
};

double gaussian(double dx, double dy, double sigma) {
    return std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
}

Point clamp_unit(Point p) { return {std::clamp(p.x, 0.0, 1.0), std::clamp(p.y, 0.0, 1.0)}; }

}  // namespace

Episode generate_episode(const EnvConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    num::Rng rng(num::mix_seed(seed));
    const std::size_t T = cfg.episode_length;

    Episode ep;
    ep.id = seed;
    ep.fps = cfg.fps;
    ep.y = rng.bernoulli(cfg.accident_prob);
    Point risk{0.5, 0.5};
    if (ep.y) {
        auto lo = static_cast<std::size_t>(std::ceil(cfg.ta_min_frac * static_cast<double>(T)));
        auto hi = static_cast<std::size_t>(std::floor(cfg.ta_max_frac * static_cast<double>(T)));
        lo = std::clamp<std::size_t>(lo, 1, T - 1);
        hi = std::clamp<std::size_t>(hi, lo, T - 1);
        ep.t_a = lo + rng.index(hi - lo + 1);
        risk = {rng.uniform(0.2, 0.8), rng.uniform(0.2, 0.8)};
        ep.risk_location = risk;
    }

    std::array<Distractor, 3> distractors{};
    for (auto& d : distractors) {
        d = {rng.uniform(0.25, 0.75), rng.uniform(0.25, 0.75), rng.uniform(0.1, 0.2),
             rng.uniform(0.0, 2.0 * std::numbers::pi), rng.uniform(0.01, 0.03), rng.uniform(0.4, 0.8)};
    }
    constexpr double kDistractorSigma = 0.12;

    // smooth gaze wander for negatives, small wobble for positives
    const double w1 = rng.uniform(0.03, 0.08), w2 = rng.uniform(0.03, 0.08);
    const double ph1 = rng.uniform(0.0, 2.0 * std::numbers::pi), ph2 = rng.uniform(0.0, 2.0 * std::numbers::pi);

    const std::optional<std::size_t> onset = blob_onset(ep);

    ep.frames.reserve(T);
    ep.fixation_track.reserve(T);
    for (std::size_t t = 0; t < T; ++t) {
        const double tt = static_cast<double>(t);
        double blob = 0.0;
        if (ep.t_a && t >= *onset) {
            const double span = static_cast<double>(*ep.t_a - *onset);
            blob = t >= *ep.t_a || span == 0.0 ? kBlobPeak : kBlobPeak * (tt - static_cast<double>(*onset)) / span;
        }
        SaliencyField f(cfg.grid_h, cfg.grid_w, 0.0, t);
        for (std::size_t r = 0; r < f.height; ++r) {
            const double y = f.center_y(r);
            for (std::size_t c = 0; c < f.width; ++c) {
                const double x = f.center_x(c);
                double v = 1.0 + kBackgroundNoise * rng.uniform();
                for (const auto& d : distractors) {
                    const double ang = d.phase + d.speed * tt;
                    v += d.amplitude *
                         gaussian(x - (d.cx + d.radius * std::cos(ang)), y - (d.cy + d.radius * std::sin(ang)),
                                  kDistractorSigma);
                }
                if (blob > 0.0) v += blob * gaussian(x - risk.x, y - risk.y, kBlobSigma);
                f.at(r, c) = v;
            }
        }
        ep.frames.push_back(normalized(std::move(f)));

        Point p;
        if (ep.y) {
            const double s = std::min(1.0, tt / static_cast<double>(*ep.t_a));
            p = {0.5 + s * (risk.x - 0.5) + 0.01 * std::sin(w1 * tt + ph1),
                 0.5 + s * (risk.y - 0.5) + 0.01 * std::sin(w2 * tt + ph2)};
        } else {
            p = {0.5 + 0.15 * std::sin(w1 * tt + ph1), 0.5 + 0.15 * std::cos(w2 * tt + ph2)};
        }
        ep.fixation_track.push_back(clamp_unit(p));
    }
    return ep;
}

}  // namespace darc::env
