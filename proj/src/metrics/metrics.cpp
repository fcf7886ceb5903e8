#include "darc/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>

#include "darc/num/serialize.hpp"

namespace darc::metrics {

namespace {

// Samples sorted by descending score, grouped into blocks of equal score.
struct Block {
    double score;
    std::size_t pos = 0;
    std::size_t neg = 0;
};

std::vector<Block> descending_blocks(std::span<const ScoredLabel> samples) {
    std::vector<ScoredLabel> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end(), [](const ScoredLabel& a, const ScoredLabel& b) { return a.score > b.score; });
    std::vector<Block> blocks;
    for (const auto& s : sorted) {
        if (std::isnan(s.score)) throw std::invalid_argument("score is NaN");
        if (blocks.empty() || blocks.back().score != s.score) blocks.push_back({s.score});
        (s.positive ? blocks.back().pos : blocks.back().neg) += 1;
    }
    return blocks;
}

std::pair<std::size_t, std::size_t> class_counts(std::span<const ScoredLabel> samples) {
    std::size_t p = 0;
    for (const auto& s : samples) p += s.positive;
    return {p, samples.size() - p};
}

}  // namespace

std::string to_string(Granularity g) { return g == Granularity::frame ? "frame" : "video"; }

Granularity parse_granularity(const std::string& s) {
    if (s == "frame") return Granularity::frame;
    if (s == "video") return Granularity::video;
    throw std::invalid_argument("granularity: expected 'frame' or 'video', got '" + s + "'");
}

std::vector<ScoredLabel> ranking_samples(std::span<const FrameRecord> records, Granularity g) {
    std::vector<ScoredLabel> out;
    if (g == Granularity::frame) {
        out.reserve(records.size());
        for (const auto& r : records) out.push_back({r.score, r.y});
        return out;
    }
    std::map<std::uint64_t, ScoredLabel> best;
    for (const auto& r : records) {
        auto [it, fresh] = best.try_emplace(r.episode_id, ScoredLabel{r.score, r.y});
        if (!fresh) it->second.score = std::max(it->second.score, r.score);
    }
    for (const auto& [id, s] : best) out.push_back(s);
    return out;
}

double roc_auc(std::span<const ScoredLabel> samples) {
    const auto [p, n] = class_counts(samples);
    if (p == 0 || n == 0) {
        throw std::invalid_argument("roc_auc: need both classes, got " + std::to_string(p) + " positive and " +
                                    std::to_string(n) + " negative samples");
    }
    // walk ascending so `below` counts negatives strictly under each block
    const auto blocks = descending_blocks(samples);
    std::uint64_t greater = 0, ties = 0, below = n;
    for (const auto& b : blocks) {
        below -= b.neg;
        greater += static_cast<std::uint64_t>(b.pos) * below;
        ties += static_cast<std::uint64_t>(b.pos) * b.neg;
    }
    return static_cast<double>(2 * greater + ties) / (2.0 * static_cast<double>(p) * static_cast<double>(n));
}

double roc_auc(std::span<const FrameRecord> records, Granularity g) {
    const auto s = ranking_samples(records, g);
    return roc_auc(s);
}

double average_precision(std::span<const ScoredLabel> samples) {
    const auto [p, n] = class_counts(samples);
    (void)n;
    if (p == 0) throw std::invalid_argument("average_precision: no positive samples");
    double ap = 0.0;
    std::size_t tp = 0, seen = 0;
    for (const auto& b : descending_blocks(samples)) {
        const std::size_t prev = tp;
        tp += b.pos;
        seen += b.pos + b.neg;
        const double d_recall = static_cast<double>(tp - prev) / static_cast<double>(p);
        ap += d_recall * (static_cast<double>(tp) / static_cast<double>(seen));
    }
    return ap;
}

double average_precision(std::span<const FrameRecord> records, Granularity g) {
    const auto s = ranking_samples(records, g);
    return average_precision(s);
}

std::vector<RocPoint> roc_curve(std::span<const ScoredLabel> samples) {
    const auto [p, n] = class_counts(samples);
    if (p == 0 || n == 0) throw std::invalid_argument("roc_curve: need both classes");
    std::vector<RocPoint> pts{{0.0, 0.0, std::numeric_limits<double>::infinity()}};
    std::size_t tp = 0, fp = 0;
    for (const auto& b : descending_blocks(samples)) {
        tp += b.pos;
        fp += b.neg;
        pts.push_back({static_cast<double>(fp) / static_cast<double>(n), static_cast<double>(tp) / static_cast<double>(p),
                       b.score});
    }
    return pts;
}

std::vector<PrPoint> pr_curve(std::span<const ScoredLabel> samples) {
    const auto [p, n] = class_counts(samples);
    (void)n;
    if (p == 0) throw std::invalid_argument("pr_curve: no positive samples");
    std::vector<PrPoint> pts;
    std::size_t tp = 0, seen = 0;
    for (const auto& b : descending_blocks(samples)) {
        tp += b.pos;
        seen += b.pos + b.neg;
        pts.push_back({static_cast<double>(tp) / static_cast<double>(p),
                       static_cast<double>(tp) / static_cast<double>(seen), b.score});
    }
    return pts;
}

double trapezoid_area(std::span<const RocPoint> points) {
    double a = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        a += (points[i].fpr - points[i - 1].fpr) * 0.5 * (points[i].tpr + points[i - 1].tpr);
    }
    return a;
}

std::vector<EpisodeSummary> summarize_episodes(std::span<const FrameRecord> records, double a_0) {
    std::map<std::uint64_t, EpisodeSummary> eps;
    std::map<std::uint64_t, std::vector<bool>> seen_frames;
    for (const auto& r : records) {
        const std::string where = "episode " + std::to_string(r.episode_id) + " frame " + std::to_string(r.t);
        if (!(r.score >= 0.0 && r.score <= 1.0)) throw std::invalid_argument(where + ": score outside [0, 1]");
        if (r.y != r.t_a.has_value()) throw std::invalid_argument(where + ": accident frame present iff label is 1");
        if (!(r.fps > 0.0)) throw std::invalid_argument(where + ": fps must be > 0");
        auto [it, fresh] = eps.try_emplace(r.episode_id);
        EpisodeSummary& e = it->second;
        if (fresh) {
            e.id = r.episode_id;
            e.y = r.y;
            e.t_a = r.t_a;
            e.fps = r.fps;
        } else if (e.y != r.y || e.t_a != r.t_a || e.fps != r.fps) {
            throw std::invalid_argument(where + ": label, accident frame or fps differs from earlier frames");
        }
        auto& mark = seen_frames[r.episode_id];
        if (mark.size() <= r.t) mark.resize(r.t + 1, false);
        if (mark[r.t]) throw std::invalid_argument(where + ": duplicate frame");
        mark[r.t] = true;
        ++e.frames;
        if (r.score > a_0 && (!e.first_alarm || r.t < *e.first_alarm)) e.first_alarm = r.t;
    }
    std::vector<EpisodeSummary> out;
    out.reserve(eps.size());
    for (auto& [id, e] : eps) {
        if (e.y) {
            e.alarmed = e.first_alarm && *e.first_alarm < *e.t_a;
            if (e.alarmed) e.tta = static_cast<double>(*e.t_a - *e.first_alarm) / e.fps;
        } else {
            e.alarmed = e.first_alarm.has_value();
        }
        out.push_back(e);
    }
    return out;
}

RecallResult recall_at_threshold(std::span<const FrameRecord> records, double a_0) {
    RecallResult r;
    for (const auto& e : summarize_episodes(records, a_0)) {
        if (e.y) {
            (e.alarmed ? r.counts.tp : r.counts.fn) += 1;
        } else {
            (e.alarmed ? r.counts.fp : r.counts.tn) += 1;
        }
    }
    const std::size_t positives = r.counts.tp + r.counts.fn;
    if (positives == 0) throw std::invalid_argument("recall: no positive episodes");
    r.recall = static_cast<double>(r.counts.tp) / static_cast<double>(positives);
    return r;
}

double mtta(std::span<const FrameRecord> records, double a_0) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& e : summarize_episodes(records, a_0)) {
        if (!e.y) continue;
        sum += e.tta;
        ++n;
    }
    if (n == 0) throw std::invalid_argument("mtta: no positive episodes");
    return sum / static_cast<double>(n);
}

double safety_fraction(std::span<const FrameRecord> records, double a_0, double margin_s) {
    std::size_t detected = 0, safe = 0;
    for (const auto& e : summarize_episodes(records, a_0)) {
        if (!e.y || !e.alarmed) continue;
        ++detected;
        safe += e.tta >= margin_s;
    }
    return detected == 0 ? 0.0 : static_cast<double>(safe) / static_cast<double>(detected);
}

double fixation_mse(std::span<const FrameRecord> records, env::FixationWindow window) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& r : records) {
        const std::optional<double> t_a = r.t_a ? std::optional<double>(static_cast<double>(*r.t_a)) : std::nullopt;
        if (!env::fixation_window_active(static_cast<double>(r.t), t_a, window)) continue;
        sum += env::squared_distance(r.p_hat, r.p);
        ++n;
    }
    if (n == 0) {
        throw std::invalid_argument("fixation_mse: no frames inside the " + env::to_string(window) + " window");
    }
    return sum / static_cast<double>(n);
}

MetricsReport compile_report(std::span<const FrameRecord> records, const ReportOptions& opts) {
    MetricsReport r;
    r.a_0 = opts.a_0;
    r.safety_margin_s = opts.safety_margin_s;
    r.granularity = opts.granularity;
    const auto samples = ranking_samples(records, opts.granularity);
    r.auc = roc_auc(samples);
    r.ap = average_precision(samples);
    r.roc_points = roc_curve(samples);
    r.pr_points = pr_curve(samples);
    const auto rec = recall_at_threshold(records, opts.a_0);
    r.recall = rec.recall;
    r.counts = rec.counts;
    r.mtta_seconds = mtta(records, opts.a_0);
    r.safety_fraction = safety_fraction(records, opts.a_0, opts.safety_margin_s);
    r.fixation_mse = fixation_mse(records, opts.window);
    r.frame_count = records.size();
    const auto eps = summarize_episodes(records, opts.a_0);
    r.episode_count = eps.size();
    for (const auto& e : eps) {
        r.positive_episodes += e.y;
        r.detected_positives += e.y && e.alarmed;
    }
    return r;
}

nlohmann::ordered_json report_to_json(const MetricsReport& r) {
    return {
        {"auc", r.auc},
        {"ap", r.ap},
        {"recall", r.recall},
        {"mtta_seconds", r.mtta_seconds},
        {"fixation_mse", r.fixation_mse},
        {"safety_fraction", r.safety_fraction},
        {"safety_margin_seconds", r.safety_margin_s},
        {"a0", r.a_0},
        {"granularity", to_string(r.granularity)},
        {"tp", r.counts.tp},
        {"fp", r.counts.fp},
        {"tn", r.counts.tn},
        {"fn", r.counts.fn},
        {"frames", r.frame_count},
        {"episodes", r.episode_count},
        {"positive_episodes", r.positive_episodes},
        {"detected_positives", r.detected_positives},
    };
}

namespace {

template <class Row>
void write_csv(const std::filesystem::path& path, const char* header, std::span<const Row> rows, auto&& fields) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << header << '\n';
    for (const auto& row : rows) {
        const auto [a, b, c] = fields(row);
        out << num::format_double(a) << ',' << num::format_double(b) << ',' << num::format_double(c) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

void write_roc_csv(const std::filesystem::path& path, std::span<const RocPoint> points) {
    write_csv(path, "fpr,tpr,threshold", points,
              [](const RocPoint& p) { return std::tuple{p.fpr, p.tpr, p.threshold}; });
}

void write_pr_csv(const std::filesystem::path& path, std::span<const PrPoint> points) {
    write_csv(path, "recall,precision,threshold", points,
              [](const PrPoint& p) { return std::tuple{p.recall, p.precision, p.threshold}; });
}

}  // namespace darc::metrics
