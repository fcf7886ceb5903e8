#include <cmath>
#include <sstream>

#include "darc/env/attention.hpp"
#include "darc/env/environment.hpp"
#include "darc/env/episode.hpp"
#include "darc/env/episode_io.hpp"
#include "darc/env/reward.hpp"
#include "darc/num/rng.hpp"
#include "darc/num/serialize.hpp"
#include "doctest.h"

using namespace darc::env;

namespace {

SaliencyField random_normalized(std::size_t h, std::size_t w, std::uint64_t seed) {
    darc::num::Rng rng(seed);
    SaliencyField f(h, w);
    for (double& v : f.cells) v = rng.uniform(0.01, 1.0);
    return normalized(f);
}

Episode find_episode(const EnvConfig& cfg, bool positive, std::uint64_t start = 0) {
    for (std::uint64_t s = start;; ++s) {
        auto ep = generate_episode(cfg, s);
        if (ep.y == positive) return ep;
    }
}

EnvConfig small_config() {
    EnvConfig cfg;
    cfg.episode_length = 60;
    return cfg;
}

}  // namespace

TEST_CASE("accident_weight") {
    CHECK(accident_weight(0.0, 5.0) == 1.0);
    CHECK(accident_weight(0.0, 0.3) == 1.0);
    CHECK(accident_weight(5.0, 5.0) == 0.0);
    CHECK(accident_weight(7.0, 5.0) == 0.0);
    // (e - 1) / (e^2 - 1) = 1 / (e + 1)
    CHECK(accident_weight(1.0, 2.0) == doctest::Approx(0.2689414213699951).epsilon(1e-14));
    CHECK(accident_weight(10.0, 1000.0) == doctest::Approx(std::exp(-10.0)).epsilon(1e-12));
    CHECK_THROWS_AS(accident_weight(-1.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(accident_weight(1.0, 0.0), std::invalid_argument);

    double prev = 1.0;
    for (double t = 0.0; t <= 12.0; t += 0.05) {
        const double w = accident_weight(t, 8.0);
        CHECK(w <= prev);
        CHECK(w >= 0.0);
        prev = w;
    }
}

TEST_CASE("reward_accident") {
    CHECK(reward_accident(0.8, 0.5, true, 0.0, 4.0) == 1.0);
    CHECK(reward_accident(0.8, 0.5, true, 4.0, 4.0) == 0.0);
    CHECK(reward_accident(0.8, 0.5, false, 2.0, std::nullopt) == 0.0);
    CHECK(reward_accident(0.2, 0.5, false, 2.0, std::nullopt) == 1.0);
    CHECK(reward_accident(0.2, 0.5, true, 1.0, 4.0) == 0.0);
    CHECK(reward_accident(0.5, 0.5, true, 0.0, 4.0) == 0.0);  // strict threshold
    CHECK_THROWS_AS(reward_accident(0.8, 0.5, true, 0.0, std::nullopt), std::invalid_argument);
    CHECK_THROWS_AS(reward_accident(1.2, 0.5, false, 0.0, std::nullopt), std::invalid_argument);
}

TEST_CASE("reward_fixation") {
    const Point p{0.3, 0.6};
    CHECK(reward_fixation(p, p, 5.0, 4.0, 0.08) == 1.0);
    CHECK(reward_fixation(p, {0.9, 0.1}, 4.0, 4.0, 0.08) == 0.0);
    CHECK(reward_fixation(p, p, 3.0, 4.0, 0.08) == 0.0);
    // squared distance equal to eta gives e^-1
    const Point q{0.3 + std::sqrt(0.08), 0.6};
    CHECK(reward_fixation(q, p, 5.0, 4.0, 0.08) == doctest::Approx(0.36787944117144233).epsilon(1e-12));
    CHECK(reward_fixation(p, p, 2.0, std::nullopt, 0.08) == 0.0);

    SUBCASE("before_accident window") {
        CHECK(reward_fixation(p, p, 3.0, 4.0, 0.08, FixationWindow::before_accident) == 1.0);
        CHECK(reward_fixation(p, p, 4.0, 4.0, 0.08, FixationWindow::before_accident) == 1.0);
        CHECK(reward_fixation(p, p, 5.0, 4.0, 0.08, FixationWindow::before_accident) == 0.0);
        CHECK(reward_fixation(p, p, 5.0, std::nullopt, 0.08, FixationWindow::before_accident) == 1.0);
    }
}

TEST_CASE("foveate") {
    SUBCASE("uniform field with central fixation is rotation symmetric") {
        SaliencyField f(16, 16, 1.0 / 256.0);
        auto out = foveate(f, {0.5, 0.5}, 0.15).field;
        for (std::size_t r = 0; r < 16; ++r) {
            for (std::size_t c = 0; c < 16; ++c) CHECK(out.at(r, c) == doctest::Approx(out.at(c, 15 - r)).epsilon(1e-15));
        }
        CHECK(out.sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("very wide Gaussian leaves the field unchanged") {
        auto f = random_normalized(16, 16, 3);
        auto out = foveate(f, {0.2, 0.9}, 1e6).field;
        for (std::size_t i = 0; i < f.cells.size(); ++i) CHECK(std::abs(out.cells[i] - f.cells[i]) < 1e-6);
    }
    SUBCASE("one-hot field stays one-hot") {
        SaliencyField f(16, 16);
        f.at(3, 11) = 1.0;
        for (Point fix : {Point{0.1, 0.1}, Point{0.5, 0.5}, Point{0.95, 0.2}}) {
            auto out = foveate(f, fix, 0.15).field;
            CHECK(out.at(3, 11) == 1.0);
            CHECK(out.sum() == 1.0);
        }
    }
    SUBCASE("underflow falls back to uniform and flags it") {
        SaliencyField f(4, 4);
        f.at(0, 0) = 1.0;
        auto out = foveate(f, {1.0, 1.0}, 1e-3);
        CHECK(out.degenerate);
        for (double v : out.field.cells) CHECK(v == 1.0 / 16.0);
    }
    SUBCASE("normalization is preserved") {
        for (std::uint64_t s = 0; s < 20; ++s) {
            auto f = random_normalized(16, 16, s);
            auto out = foveate(f, {0.05 * static_cast<double>(s), 0.5}, 0.15).field;
            CHECK(std::abs(out.sum() - 1.0) <= 1e-9);
        }
    }
}

TEST_CASE("combine_attention") {
    const auto a = random_normalized(16, 16, 1);
    const auto b = random_normalized(16, 16, 2);
    auto at0 = combine_attention(a, b, 0.0);
    auto at1 = combine_attention(a, b, 1.0);
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
        CHECK(at0.cells[i] == doctest::Approx(a.cells[i]).epsilon(1e-12));
        CHECK(at1.cells[i] == doctest::Approx(b.cells[i]).epsilon(1e-12));
    }
    CHECK(std::abs(combine_attention(a, b, 0.5).sum() - 1.0) <= 1e-9);
    for (double rho : {0.0, 0.3, 0.77, 1.0}) {
        auto same = combine_attention(a, a, rho);
        for (std::size_t i = 0; i < a.cells.size(); ++i) CHECK(same.cells[i] == doctest::Approx(a.cells[i]).epsilon(1e-12));
    }
    CHECK_THROWS_AS(combine_attention(a, b, 1.1), std::invalid_argument);
    CHECK_THROWS_AS(combine_attention(a, b, -0.01), std::invalid_argument);
}

TEST_CASE("pool_features") {
    SaliencyField uniform(16, 16, 1.0 / 256.0);
    auto pooled = pool_features(uniform, 8, 8);
    REQUIRE(pooled.size() == 64);
    for (double v : pooled) CHECK(v == pooled[0]);

    SaliencyField hot(16, 16);
    hot.at(5, 9) = 1.0;
    auto p = pool_features(hot, 8, 8);
    int nonzero = 0;
    for (double v : p) nonzero += v != 0.0;
    CHECK(nonzero == 1);
    CHECK(p[(5 / 2) * 8 + 9 / 2] == 0.25);

    auto f = random_normalized(16, 16, 8);
    double s = 0.0;
    for (double v : pool_features(f, 4, 4)) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        s += v;
    }
    CHECK(s * 16.0 == doctest::Approx(f.sum()).epsilon(1e-12));  // block size 4x4

    CHECK_THROWS_AS(pool_features(f, 5, 5), std::invalid_argument);
}

TEST_CASE("generate_episode") {
    const auto cfg = small_config();
    CHECK(generate_episode(cfg, 5) == generate_episode(cfg, 5));

    const auto neg = find_episode(cfg, false);
    CHECK_FALSE(neg.t_a.has_value());
    CHECK_NOTHROW(neg.validate());

    const auto pos = find_episode(cfg, true);
    REQUIRE(pos.t_a.has_value());
    CHECK(*pos.t_a >= 36);
    CHECK(*pos.t_a <= 54);
    CHECK_NOTHROW(pos.validate());
    for (const auto& f : pos.frames) CHECK(std::abs(f.sum() - 1.0) <= 1e-9);
}

TEST_CASE("risk blob mass strictly increases through the ramp") {
    const auto cfg = small_config();
    int checked = 0;
    for (std::uint64_t seed = 0; checked < 25; ++seed) {
        const auto ep = generate_episode(cfg, seed);
        if (!ep.y) continue;
        ++checked;
        const Point c = *ep.risk_location;
        auto disc_mass = [&](const SaliencyField& f) {
            double m = 0.0;
            for (std::size_t r = 0; r < f.height; ++r)
                for (std::size_t col = 0; col < f.width; ++col)
                    if (squared_distance({f.center_x(col), f.center_y(r)}, c) <= 9.0 * kBlobSigma * kBlobSigma)
                        m += f.at(r, col);
            return m;
        };
        const std::size_t onset = *blob_onset(ep);
        for (std::size_t t = onset + 1; t <= *ep.t_a; ++t) {
            CHECK(disc_mass(ep.frames[t]) > disc_mass(ep.frames[t - 1]));
        }
    }
}

TEST_CASE("episode file round trip and rejection") {
    const auto cfg = small_config();
    const auto ep = find_episode(cfg, true);
    std::stringstream ss;
    write_episode(ss, ep);
    const std::string text = ss.str();
    auto back = read_episode(ss);
    CHECK(back == ep);

    SUBCASE("fixation outside the unit square names the frame") {
        std::string bad = text;
        // rewrite frame 3's trailing coordinates
        std::size_t line_start = 0;
        for (int i = 0; i < 4; ++i) line_start = bad.find('\n', line_start) + 1;
        const std::size_t line_end = bad.find('\n', line_start);
        std::string line = bad.substr(line_start, line_end - line_start);
        const std::size_t last = line.rfind(' ');
        const std::size_t second_last = line.rfind(' ', last - 1);
        line = line.substr(0, second_last) + " 1.5 0.2";
        bad = bad.substr(0, line_start) + line + bad.substr(line_end);
        std::stringstream in(bad);
        try {
            (void)read_episode(in);
            FAIL("expected a FormatError");
        } catch (const darc::num::FormatError& e) {
            CHECK(std::string(e.what()).find("frame 3") != std::string::npos);
            CHECK(e.line() == 5);
        }
    }
    SUBCASE("truncated final record is rejected") {
        std::string bad = text.substr(0, text.size() - 40);
        std::stringstream in(bad);
        CHECK_THROWS_AS((void)read_episode(in), darc::num::FormatError);
    }
    SUBCASE("version mismatch is rejected") {
        std::string bad = "ADE2" + text.substr(4);
        std::stringstream in(bad);
        CHECK_THROWS_AS((void)read_episode(in), darc::num::FormatError);
    }
}

TEST_CASE("AccidentEnv rollout") {
    auto cfg = small_config();
    const auto pos = find_episode(cfg, true);
    AccidentEnv env(cfg);
    const auto& obs = env.reset(pos);
    CHECK(obs.features.size() == cfg.feature_dim());
    CHECK(obs.frame_index == 0);
    for (double v : obs.features) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    const auto first = env.observation();
    CHECK(env.reset(pos) == first);

    SUBCASE("constant alarm earns the weight trace") {
        std::size_t steps = 0;
        while (!env.done()) {
            const std::size_t t = env.cursor();
            auto r = env.step({1.0, pos.fixation_track[t]});
            ++steps;
            CHECK(r.next_obs.frame_index == t + 1);
            const double w = t < *pos.t_a ? accident_weight(static_cast<double>(t) / pos.fps,
                                                            static_cast<double>(*pos.t_a) / pos.fps)
                                          : 0.0;
            CHECK(r.r_A == w);
            if (t > *pos.t_a) CHECK(r.r_F == 1.0);
            CHECK(r.done == (t + 2 == pos.length()));
        }
        CHECK(steps == pos.length() - 1);
        CHECK_THROWS_AS(env.step({0.0, {0.5, 0.5}}), std::logic_error);
    }
    SUBCASE("rollouts are deterministic") {
        darc::num::Rng rng(3);
        std::vector<DualAction> actions;
        for (std::size_t i = 0; i + 1 < pos.length(); ++i) actions.push_back({rng.uniform(), {rng.uniform(), rng.uniform()}});
        std::vector<StepResult> a, b;
        env.reset(pos);
        for (const auto& act : actions) a.push_back(env.step(act));
        env.reset(pos);
        for (const auto& act : actions) b.push_back(env.step(act));
        CHECK(a == b);
    }
    SUBCASE("empty episode is rejected") {
        Episode empty;
        CHECK_THROWS_AS(env.reset(empty), std::invalid_argument);
    }
}
