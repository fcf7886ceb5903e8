#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "darc/env/field.hpp"
#include "darc/env/reward.hpp"
#include "json.hpp"

namespace darc::metrics {

/// One evaluated frame. Label, accident frame and fps are per episode and
/// must agree across that episode's frames.
struct FrameRecord {
    std::uint64_t episode_id = 0;
    std::size_t t = 0;
    double score = 0.0;
    bool y = false;
    std::optional<std::size_t> t_a;
    env::Point p_hat;
    env::Point p;
    double fps = 10.0;
    bool operator==(const FrameRecord&) const = default;
};

/// frame: every frame is a sample carrying its episode's label.
/// video: one sample per episode, scored by its maximum frame score.
enum class Granularity { frame, video };
std::string to_string(Granularity g);
Granularity parse_granularity(const std::string& s);

struct ScoredLabel {
    double score = 0.0;
    bool positive = false;
};
std::vector<ScoredLabel> ranking_samples(std::span<const FrameRecord> records, Granularity g);

/// Mann-Whitney statistic, ties counted as half. Exact: evaluated as
/// (2 * greater + ties) / (2 * P * N) from integer pair counts.
/// Throws std::invalid_argument unless both classes are present.
double roc_auc(std::span<const ScoredLabel> samples);
double roc_auc(std::span<const FrameRecord> records, Granularity g = Granularity::frame);

/// Step-integrated area under the PR curve. Samples are visited by
/// descending score; each block of equal scores adds
/// (TP - TP_prev) / P * TP / (items seen). Throws when there are no positives.
double average_precision(std::span<const ScoredLabel> samples);
double average_precision(std::span<const FrameRecord> records, Granularity g = Granularity::frame);

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
    double threshold = 0.0;  // samples with score >= threshold are flagged
};
struct PrPoint {
    double recall = 0.0;
    double precision = 0.0;
    double threshold = 0.0;
};
/// One point per distinct score, descending; the ROC list starts at (0, 0)
/// with threshold +inf.
std::vector<RocPoint> roc_curve(std::span<const ScoredLabel> samples);
std::vector<PrPoint> pr_curve(std::span<const ScoredLabel> samples);
double trapezoid_area(std::span<const RocPoint> points);

struct Counts {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    bool operator==(const Counts&) const = default;
};

/// Per-episode view of the records, ordered by episode id.
struct EpisodeSummary {
    std::uint64_t id = 0;
    bool y = false;
    std::optional<std::size_t> t_a;
    double fps = 10.0;
    std::size_t frames = 0;
    /// First frame whose score exceeds the threshold.
    std::optional<std::size_t> first_alarm;
    /// Positive: alarm strictly before t_a. Negative: any alarm.
    bool alarmed = false;
    /// (t_a - first_alarm) / fps, zero when late or absent; positives only.
    double tta = 0.0;
};
/// Throws std::invalid_argument on inconsistent labels, scores outside
/// [0, 1], positives without t_a, or duplicate frames.
std::vector<EpisodeSummary> summarize_episodes(std::span<const FrameRecord> records, double a_0);

struct RecallResult {
    double recall = 0.0;
    Counts counts;
};
/// Episode-level recall TP / (TP + FN). Throws without positive episodes.
RecallResult recall_at_threshold(std::span<const FrameRecord> records, double a_0);
/// Mean TTA in seconds over all positive episodes, zeros included.
double mtta(std::span<const FrameRecord> records, double a_0);
/// Share of detected positive episodes warned at least `margin_s` seconds
/// ahead; 0 when nothing was detected.
double safety_fraction(std::span<const FrameRecord> records, double a_0, double margin_s = 2.0);

/// Mean squared fixation error over frames inside the fixation window.
/// Throws when no frame falls inside it.
double fixation_mse(std::span<const FrameRecord> records,
                    env::FixationWindow window = env::FixationWindow::after_accident);

struct ReportOptions {
    double a_0 = 0.5;
    Granularity granularity = Granularity::frame;
    env::FixationWindow window = env::FixationWindow::after_accident;
    double safety_margin_s = 2.0;
};

struct MetricsReport {
    double auc = 0.0;
    double ap = 0.0;
    double recall = 0.0;
    double mtta_seconds = 0.0;
    double fixation_mse = 0.0;
    double safety_fraction = 0.0;
    double a_0 = 0.5;
    double safety_margin_s = 2.0;
    Granularity granularity = Granularity::frame;
    Counts counts;
    std::size_t frame_count = 0;
    std::size_t episode_count = 0;
    std::size_t positive_episodes = 0;
    std::size_t detected_positives = 0;
    std::vector<RocPoint> roc_points;
    std::vector<PrPoint> pr_points;
};

MetricsReport compile_report(std::span<const FrameRecord> records, const ReportOptions& opts = {});

/// Flat key-value document (curves excluded; they go to the CSV files).
nlohmann::ordered_json report_to_json(const MetricsReport& r);
/// roc.csv: fpr,tpr,threshold   pr.csv: recall,precision,threshold
void write_roc_csv(const std::filesystem::path& path, std::span<const RocPoint> points);
void write_pr_csv(const std::filesystem::path& path, std::span<const PrPoint> points);

}  // namespace darc::metrics
