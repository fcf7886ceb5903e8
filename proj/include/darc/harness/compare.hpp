#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace darc::harness {

/// Per-seed metrics.json documents of one training run.
struct AlgoRun {
    std::string name;
    std::uint64_t eval_set_hash = 0;
    std::vector<nlohmann::ordered_json> seed_metrics;
};

/// Reads run.json and every seed_<n>/metrics.json under `dir`. The run
/// is labelled `name` if given, else by its algorithm. Incomplete runs are
/// rejected.
AlgoRun load_run(const std::filesystem::path& dir, const std::optional<std::string>& name = std::nullopt);

struct ComparisonMetric {
    std::string key;    // field in metrics.json
    std::string label;  // row name in the table
    bool lower_is_better = false;
};
/// mTTA, AUC, AP, recall, fixationMSE, then the safety fraction and the
/// final eval reward.
const std::vector<ComparisonMetric>& comparison_metrics();

struct Cell {
    double median = 0.0;
    double min = 0.0;
    double max = 0.0;
    bool best = false;
};

struct ComparisonTable {
    std::vector<std::string> algos;  // sorted by name
    std::vector<ComparisonMetric> rows;
    std::vector<std::vector<Cell>> cells;  // [row][algo]
    std::uint64_t eval_set_hash = 0;
};

double median(std::vector<double> v);

/// Median over seeds with min/max; every cell equal to the row's best
/// median is flagged. Needs >= 2 distinctly named runs on one eval set.
ComparisonTable compare_table(std::vector<AlgoRun> runs);

/// Wide CSV: metric, then <algo>_median,<algo>_min,<algo>_max per algorithm,
/// then best (flagged algorithms joined by '|').
void write_comparison_csv(const std::filesystem::path& path, const ComparisonTable& t);
/// Markdown rendering of the same table, best cells in bold.
void write_comparison_markdown(const std::filesystem::path& path, const ComparisonTable& t);

}  // namespace darc::harness
