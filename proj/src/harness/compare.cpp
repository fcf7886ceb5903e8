#include "darc/harness/compare.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

#include "darc/harness/report_io.hpp"
#include "darc/num/serialize.hpp"

namespace darc::harness {

AlgoRun load_run(const std::filesystem::path& dir, const std::optional<std::string>& name) {
    const auto run = read_json_file(dir / "run.json");
    if (!run.value("complete", false)) throw std::runtime_error("run is incomplete: " + dir.string());
    AlgoRun r;
    r.name = name ? *name : run.at("algo").get<std::string>();
    const std::string hash = run.at("eval_set_hash").get<std::string>();
    r.eval_set_hash = std::stoull(hash, nullptr, 16);
    for (const auto& seed : run.at("seeds")) {
        r.seed_metrics.push_back(
            read_json_file(dir / ("seed_" + std::to_string(seed.get<std::uint64_t>())) / "metrics.json"));
    }
    if (r.seed_metrics.empty()) throw std::runtime_error("run has no seeds: " + dir.string());
    return r;
}

const std::vector<ComparisonMetric>& comparison_metrics() {
    static const std::vector<ComparisonMetric> rows = {
        {"mtta_seconds", "mTTA", false},
        {"auc", "AUC", false},
        {"ap", "AP", false},
        {"recall", "recall", false},
        {"fixation_mse", "fixationMSE", true},
        {"safety_fraction", "safety_tta_ge_2s", false},
        {"final_eval_reward", "final_eval_reward", false},
    };
    return rows;
}

double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median of an empty list");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

ComparisonTable compare_table(std::vector<AlgoRun> runs) {
    std::sort(runs.begin(), runs.end(), [](const AlgoRun& a, const AlgoRun& b) { return a.name < b.name; });
    if (runs.size() < 2) throw std::invalid_argument("compare: need runs of at least 2 algorithms");
    for (std::size_t i = 1; i < runs.size(); ++i) {
        if (runs[i].name == runs[i - 1].name) throw std::invalid_argument("compare: duplicate name '" + runs[i].name + "'");
        if (runs[i].eval_set_hash != runs[0].eval_set_hash) {
            throw std::invalid_argument("compare: eval sets differ (" + runs[0].name + " " + hex64(runs[0].eval_set_hash) +
                                        " vs " + runs[i].name + " " + hex64(runs[i].eval_set_hash) + ")");
        }
    }
    ComparisonTable t;
    t.eval_set_hash = runs[0].eval_set_hash;
    t.rows = comparison_metrics();
    for (const auto& r : runs) t.algos.push_back(r.name);
    for (const auto& m : t.rows) {
        std::vector<Cell> row;
        for (const auto& r : runs) {
            std::vector<double> v;
            for (const auto& doc : r.seed_metrics) {
                if (!doc.contains(m.key)) throw std::runtime_error("compare: " + r.name + " metrics lack '" + m.key + "'");
                v.push_back(doc.at(m.key).get<double>());
            }
            row.push_back({median(v), *std::min_element(v.begin(), v.end()), *std::max_element(v.begin(), v.end())});
        }
        double best = row[0].median;
        for (const auto& c : row) best = m.lower_is_better ? std::min(best, c.median) : std::max(best, c.median);
        for (auto& c : row) c.best = c.median == best;
        t.cells.push_back(std::move(row));
    }
    return t;
}

void write_comparison_csv(const std::filesystem::path& path, const ComparisonTable& t) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "metric";
    for (const auto& a : t.algos) out << ',' << a << "_median," << a << "_min," << a << "_max";
    out << ",best\n";
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        out << t.rows[r].label;
        std::string best;
        for (std::size_t a = 0; a < t.algos.size(); ++a) {
            const Cell& c = t.cells[r][a];
            out << ',' << num::format_double(c.median) << ',' << num::format_double(c.min) << ','
                << num::format_double(c.max);
            if (c.best) best += (best.empty() ? "" : "|") + t.algos[a];
        }
        out << ',' << best << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_comparison_markdown(const std::filesystem::path& path, const ComparisonTable& t) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "| metric |";
    for (const auto& a : t.algos) out << ' ' << a << " |";
    out << "\n|---|";
    for (std::size_t a = 0; a < t.algos.size(); ++a) out << "---|";
    out << '\n';
    char buf[128];
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        out << "| " << t.rows[r].label << " |";
        for (const auto& c : t.cells[r]) {
            std::snprintf(buf, sizeof buf, "%.4f [%.4f, %.4f]", c.median, c.min, c.max);
            out << ' ' << (c.best ? "**" : "") << buf << (c.best ? "**" : "") << " |";
        }
        out << '\n';
    }
    out << "\nmedian over seeds [min, max]; best per row in bold (lowest for fixationMSE). eval set "
        << hex64(t.eval_set_hash) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace darc::harness
