#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "darc/harness/compare.hpp"
#include "darc/harness/config.hpp"
#include "darc/harness/dataset.hpp"
#include "darc/harness/report_io.hpp"
#include "darc/harness/runner.hpp"

using namespace darc;
using namespace darc::harness;

namespace {

constexpr int kUsageError = 1;
constexpr int kRuntimeError = 2;

void print_report(const std::string& label, const metrics::MetricsReport& r) {
    std::printf("%-12s auc=%.4f ap=%.4f recall=%.4f mtta=%.3fs fixation_mse=%.5f safety=%.3f\n", label.c_str(), r.auc,
                r.ap, r.recall, r.mtta_seconds, r.fixation_mse, r.safety_fraction);
}

int cmd_gen_data(const RunOverrides& o, std::size_t count, std::uint64_t seed_base) {
    const RunConfig cfg = resolve_config(o);
    const auto rows = gen_dataset(cfg.env, count, seed_base, cfg.out_dir);
    std::size_t pos = 0;
    for (const auto& r : rows) pos += r.y;
    std::printf("wrote %zu episodes (%zu positive) to %s\n", rows.size(), pos, cfg.out_dir.string().c_str());
    return 0;
}

int cmd_train(const RunOverrides& o) {
    const RunConfig cfg = resolve_config(o);
    const RunArtifacts art = run_training(cfg);
    for (const auto& s : art.seeds) {
        print_report(rl::to_string(cfg.agent.algo) + "/" + std::to_string(s.seed), s.report);
        std::printf("%-12s final_eval_reward=%.4f\n", "", s.final_eval_reward);
    }
    std::printf("outputs in %s\n", cfg.out_dir.string().c_str());
    return 0;
}

int cmd_eval(const RunOverrides& o, const std::string& checkpoint, const std::string& policy) {
    const RunConfig cfg = resolve_config(o);
    EvalArtifacts art;
    if (policy == "agent") {
        if (checkpoint.empty()) throw ConfigError("checkpoint: required when --policy is agent");
        art = run_eval(checkpoint, cfg);
    } else {
        const auto eps = eval_episodes(cfg);
        const Policy p = policy == "oracle" ? oracle_policy() : constant_policy(0.0);
        nlohmann::ordered_json extra;
        extra["policy"] = policy;
        art = evaluate_and_export(p, eps, cfg, cfg.out_dir, extra);
    }
    print_report(policy, art.report);
    std::printf("outputs in %s\n", cfg.out_dir.string().c_str());
    return 0;
}

int cmd_compare(const std::vector<std::string>& specs, const std::string& out_dir) {
    std::vector<AlgoRun> runs;
    for (const auto& s : specs) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) runs.push_back(load_run(s));
        else runs.push_back(load_run(s.substr(eq + 1), s.substr(0, eq)));
    }
    const ComparisonTable t = compare_table(std::move(runs));
    std::filesystem::create_directories(out_dir);
    write_comparison_csv(std::filesystem::path(out_dir) / "comparison.csv", t);
    write_comparison_markdown(std::filesystem::path(out_dir) / "comparison.md", t);
    std::ifstream md(std::filesystem::path(out_dir) / "comparison.md");
    std::cout << md.rdbuf();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DARC / TD3 / DDPG / SAC accident-anticipation toolkit"};
    app.require_subcommand(1);

    RunOverrides gen_o, train_o, eval_o;
    std::size_t count = 100;
    std::uint64_t seed_base = 0;
    auto* gen = app.add_subcommand("gen-data", "write synthetic episode files and a manifest");
    add_run_options(*gen, gen_o);
    gen->add_option("--count", count, "number of episodes")->capture_default_str();
    gen->add_option("--seed-base", seed_base, "first episode seed")->capture_default_str();

    auto* train = app.add_subcommand("train", "train one agent per seed and export metrics");
    add_run_options(*train, train_o);

    std::string checkpoint, policy = "agent";
    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint (or a scripted policy) on the eval set");
    add_run_options(*eval, eval_o);
    eval->add_option("--checkpoint", checkpoint, "agent checkpoint file");
    eval->add_option("--policy", policy, "agent | oracle | zero")
        ->check(CLI::IsMember({"agent", "oracle", "zero"}))
        ->capture_default_str();

    std::vector<std::string> run_specs;
    std::string compare_out = ".";
    auto* compare = app.add_subcommand("compare", "tabulate runs of several algorithms");
    compare->add_option("runs", run_specs, "run directories, optionally as name=dir")->required()->expected(2, -1);
    compare->add_option("--out", compare_out, "directory for comparison.csv / comparison.md");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsageError;
    }

    try {
        if (*gen) return cmd_gen_data(gen_o, count, seed_base);
        if (*train) return cmd_train(train_o);
        if (*eval) return cmd_eval(eval_o, checkpoint, policy);
        if (*compare) return cmd_compare(run_specs, compare_out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kUsageError;
}
