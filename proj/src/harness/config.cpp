#include "darc/harness/config.hpp"

#include <fstream>

#include "CLI11.hpp"

namespace darc::harness {

namespace {

template <typename T>
void read_value(const nlohmann::json& j, const std::string& key, T& out) {
    try {
        out = j.get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(key + ": wrong type (" + j.dump() + ")");
    }
}

void read_count(const nlohmann::json& j, const std::string& key, std::size_t& out) {
    if (!j.is_number_integer() || j.get<long long>() < 0) {
        throw ConfigError(key + ": expected a nonnegative integer, got " + j.dump());
    }
    out = j.get<std::size_t>();
}

void read_seed(const nlohmann::json& j, const std::string& key, std::uint64_t& out) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
        throw ConfigError(key + ": expected a nonnegative integer, got " + j.dump());
    }
    out = j.get<std::uint64_t>();
}

template <typename Fn>
auto rethrow_as_config(Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

}  // namespace

double default_input_scale(const env::EnvConfig& env) { return static_cast<double>(env.grid_h * env.grid_w); }

void RunConfig::validate() const {
    if (seeds.empty()) throw ConfigError("seeds: must list at least one seed");
    if (epochs < 1) throw ConfigError("epochs: must be >= 1");
    if (episodes_per_epoch < 1) throw ConfigError("episodes_per_epoch: must be >= 1");
    if (eval_episode_count < 1) throw ConfigError("eval_episodes: must be >= 1");
    if (eval_every < 1) throw ConfigError("eval_every: must be >= 1");
    rethrow_as_config([&] {
        env.validate();
        agent.validate();
        return 0;
    });
    if (data_dir && !std::filesystem::is_directory(*data_dir)) {
        throw ConfigError("data: not a directory: " + data_dir->string());
    }
}

nlohmann::ordered_json env_to_json(const env::EnvConfig& c) {
    return {
        {"a0", c.a0},
        {"eta", c.eta},
        {"rho", c.rho},
        {"sigma_f", c.sigma_f},
        {"stack", c.stack},
        {"grid_h", c.grid_h},
        {"grid_w", c.grid_w},
        {"pool_h", c.pool_h},
        {"pool_w", c.pool_w},
        {"episode_length", c.episode_length},
        {"accident_prob", c.accident_prob},
        {"ta_min_frac", c.ta_min_frac},
        {"ta_max_frac", c.ta_max_frac},
        {"fps", c.fps},
        {"fixation_window", env::to_string(c.fixation_window)},
        {"time_unit", env::to_string(c.time_unit)},
    };
}

env::EnvConfig env_from_json(const nlohmann::json& j, env::EnvConfig c) {
    if (!j.is_object()) throw ConfigError("env: expected an object");
    for (const auto& [key, v] : j.items()) {
        const std::string k = "env." + key;
        if (key == "a0") read_value(v, k, c.a0);
        else if (key == "eta") read_value(v, k, c.eta);
        else if (key == "rho") read_value(v, k, c.rho);
        else if (key == "sigma_f") read_value(v, k, c.sigma_f);
        else if (key == "stack") read_count(v, k, c.stack);
        else if (key == "grid_h") read_count(v, k, c.grid_h);
        else if (key == "grid_w") read_count(v, k, c.grid_w);
        else if (key == "pool_h") read_count(v, k, c.pool_h);
        else if (key == "pool_w") read_count(v, k, c.pool_w);
        else if (key == "episode_length") read_count(v, k, c.episode_length);
        else if (key == "accident_prob") read_value(v, k, c.accident_prob);
        else if (key == "ta_min_frac") read_value(v, k, c.ta_min_frac);
        else if (key == "ta_max_frac") read_value(v, k, c.ta_max_frac);
        else if (key == "fps") read_value(v, k, c.fps);
        else if (key == "fixation_window" || key == "time_unit") {
            std::string s;
            read_value(v, k, s);
            rethrow_as_config([&] {
                if (key == "fixation_window") c.fixation_window = env::parse_fixation_window(s);
                else c.time_unit = env::parse_time_unit(s);
                return 0;
            });
        } else {
            throw ConfigError(k + ": unknown key");
        }
    }
    return c;
}

nlohmann::ordered_json to_json(const RunConfig& c) {
    nlohmann::ordered_json j;
    j["algo"] = rl::to_string(c.agent.algo);
    j["seeds"] = c.seeds;
    j["epochs"] = c.epochs;
    j["episodes_per_epoch"] = c.episodes_per_epoch;
    j["eval_episodes"] = c.eval_episode_count;
    j["eval_every"] = c.eval_every;
    j["eval_seed_base"] = c.eval_seed_base;
    j["threads"] = c.threads;
    j["granularity"] = metrics::to_string(c.granularity);
    j["write_traces"] = c.write_traces;
    j["data"] = c.data_dir ? nlohmann::ordered_json(c.data_dir->string()) : nlohmann::ordered_json(nullptr);
    j["out"] = c.out_dir.string();
    j["env"] = env_to_json(c.env);
    j["agent"] = rl::to_json(c.agent);
    return j;
}

RunConfig run_config_from_json(const nlohmann::json& j, RunConfig c) {
    if (!j.is_object()) throw ConfigError("config: expected a JSON object at top level");
    bool scale_given = false;
    // env first so a later default input scale sees the final grid
    if (j.contains("env")) c.env = env_from_json(j["env"], c.env);
    for (const auto& [key, v] : j.items()) {
        if (key == "env") continue;
        if (key == "algo") {
            std::string s;
            read_value(v, key, s);
            c.agent.algo = rethrow_as_config([&] { return rl::parse_algo(s); });
        } else if (key == "seeds") {
            if (!v.is_array()) throw ConfigError("seeds: expected an array");
            c.seeds.clear();
            for (const auto& e : v) {
                std::uint64_t s = 0;
                read_seed(e, key, s);
                c.seeds.push_back(s);
            }
        } else if (key == "epochs") read_count(v, key, c.epochs);
        else if (key == "episodes_per_epoch") read_count(v, key, c.episodes_per_epoch);
        else if (key == "eval_episodes") read_count(v, key, c.eval_episode_count);
        else if (key == "eval_every") read_count(v, key, c.eval_every);
        else if (key == "eval_seed_base") read_seed(v, key, c.eval_seed_base);
        else if (key == "threads") read_count(v, key, c.threads);
        else if (key == "granularity") {
            std::string s;
            read_value(v, key, s);
            c.granularity = rethrow_as_config([&] { return metrics::parse_granularity(s); });
        } else if (key == "write_traces") read_value(v, key, c.write_traces);
        else if (key == "data") {
            if (v.is_null()) c.data_dir.reset();
            else {
                std::string s;
                read_value(v, key, s);
                c.data_dir = s;
            }
        } else if (key == "out") {
            std::string s;
            read_value(v, key, s);
            c.out_dir = s;
        } else if (key == "agent") {
            scale_given = v.is_object() && v.contains("input_scale");
            c.agent = rethrow_as_config([&] { return rl::agent_config_from_json(v, c.agent); });
        } else {
            throw ConfigError(key + ": unknown key");
        }
    }
    if (!scale_given && j.contains("env")) c.agent.input_scale = default_input_scale(c.env);
    return c;
}

void add_run_options(CLI::App& app, RunOverrides& o) {
    app.add_option("--config", o.config_file, "JSON config file (flags override it)");
    app.add_option("--algo", o.algo, "ddpg | td3 | sac | darc");
    app.add_option("--seed,--seeds", o.seeds, "one or more seeds")->expected(1, -1);
    app.add_option("--epochs", o.epochs);
    app.add_option("--episodes-per-epoch", o.episodes_per_epoch);
    app.add_option("--eval-episodes", o.eval_episodes);
    app.add_option("--threads", o.threads, "worker threads for the seed sweep (0 = all cores)");
    app.add_option("--data", o.data_dir, "episode-file directory (default: generated episodes)");
    app.add_option("--out", o.out_dir, "output directory");
    app.add_option("--a0", o.a0, "accident score threshold");
    app.add_option("--eta", o.eta, "fixation reward bandwidth");
    app.add_option("--rho", o.rho, "bottom-up / top-down attention ratio");
    app.add_option("--nu", o.nu, "critic regularization weight (darc)");
    app.add_option("--gamma", o.gamma, "discount");
    app.add_option("--tau", o.tau, "target tracking rate");
    app.add_option("--fixation-window", o.fixation_window, "after_accident | before_accident");
    app.add_option("--time-unit", o.time_unit, "seconds | frames (earliness weight)");
    app.add_option("--granularity", o.granularity, "frame | video (AUC/AP samples)");
}

RunConfig resolve_config(const RunOverrides& o) {
    RunConfig c;
    c.agent.input_scale = default_input_scale(c.env);
    if (o.config_file) {
        std::ifstream in(*o.config_file);
        if (!in) throw ConfigError("config: cannot open " + o.config_file->string());
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError("config: " + o.config_file->string() + ": " + e.what());
        }
        c = run_config_from_json(j, c);
    }
    if (o.algo) c.agent.algo = rethrow_as_config([&] { return rl::parse_algo(*o.algo); });
    if (!o.seeds.empty()) c.seeds = o.seeds;
    if (o.epochs) c.epochs = *o.epochs;
    if (o.episodes_per_epoch) c.episodes_per_epoch = *o.episodes_per_epoch;
    if (o.eval_episodes) c.eval_episode_count = *o.eval_episodes;
    if (o.threads) c.threads = *o.threads;
    if (o.data_dir) c.data_dir = *o.data_dir;
    if (o.out_dir) c.out_dir = *o.out_dir;
    if (o.a0) c.env.a0 = *o.a0;
    if (o.eta) c.env.eta = *o.eta;
    if (o.rho) c.env.rho = *o.rho;
    if (o.nu) c.agent.nu = *o.nu;
    if (o.gamma) c.agent.gamma = *o.gamma;
    if (o.tau) c.agent.tau = *o.tau;
    rethrow_as_config([&] {
        if (o.fixation_window) c.env.fixation_window = env::parse_fixation_window(*o.fixation_window);
        if (o.time_unit) c.env.time_unit = env::parse_time_unit(*o.time_unit);
        if (o.granularity) c.granularity = metrics::parse_granularity(*o.granularity);
        return 0;
    });
    c.validate();
    return c;
}

RunConfig parse_config(const std::vector<std::string>& args) {
    CLI::App app{"darc run"};
    RunOverrides o;
    add_run_options(app, o);
    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        throw ConfigError(e.what());
    }
    return resolve_config(o);
}

void write_config_snapshot(const RunConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    const auto path = cfg.out_dir / "config.json";
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << to_json(cfg).dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace darc::harness
