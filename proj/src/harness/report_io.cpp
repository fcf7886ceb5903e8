#include "darc/harness/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "darc/num/serialize.hpp"

namespace darc::harness {

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void write_json_file(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

nlohmann::ordered_json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    try {
        return nlohmann::ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

void write_curve_csv(const std::filesystem::path& path, std::span<const CurvePoint> curve) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "epoch,mean_eval_reward\n";
    for (const auto& p : curve) out << p.epoch << ',' << num::format_double(p.mean_eval_reward) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_trace(const std::filesystem::path& dir, std::span<const metrics::FrameRecord> records,
                 std::span<const FrameRewards> rewards) {
    if (records.empty()) throw std::invalid_argument("write_trace: no records");
    if (records.size() != rewards.size()) throw std::invalid_argument("write_trace: records and rewards differ in length");
    const auto& first = records.front();
    const auto path = dir / ("trace_" + std::to_string(first.episode_id) + ".csv");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "# episode=" << first.episode_id << " y=" << (first.y ? 1 : 0)
        << " t_a=" << (first.t_a ? std::to_string(*first.t_a) : "none") << " fps=" << num::format_double(first.fps)
        << '\n';
    out << "t,score,w_t,r_A,r_F,p_hat_x,p_hat_y,p_x,p_y\n";
    using num::format_double;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        const auto& w = rewards[i];
        out << r.t << ',' << format_double(r.score) << ',' << format_double(w.w_t) << ',' << format_double(w.r_A) << ','
            << format_double(w.r_F) << ',' << format_double(r.p_hat.x) << ',' << format_double(r.p_hat.y) << ','
            << format_double(r.p.x) << ',' << format_double(r.p.y) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_traces(const std::filesystem::path& dir, const Rollout& r) {
    std::filesystem::create_directories(dir);
    std::size_t begin = 0;
    while (begin < r.records.size()) {
        std::size_t end = begin;
        while (end < r.records.size() && r.records[end].episode_id == r.records[begin].episode_id) ++end;
        write_trace(dir, std::span(r.records).subspan(begin, end - begin),
                    std::span(r.rewards).subspan(begin, end - begin));
        begin = end;
    }
}

}  // namespace darc::harness
