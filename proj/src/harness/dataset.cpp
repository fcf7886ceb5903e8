#include "darc/harness/dataset.hpp"

#include <bit>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "darc/env/episode_io.hpp"
#include "darc/num/serialize.hpp"

namespace darc::harness {

namespace {

constexpr const char* kManifestHeader = "id,file,label,t_a,frames";

struct Fnv {
    std::uint64_t h = 1469598103934665603ULL;
    void bytes(const void* p, std::size_t n) {
        const auto* c = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= c[i];
            h *= 1099511628211ULL;
        }
    }
    void u64(std::uint64_t v) { bytes(&v, sizeof v); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
};

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

std::string episode_file_name(std::uint64_t id) { return "episode_" + std::to_string(id) + ".ade"; }

std::vector<ManifestRow> gen_dataset(const env::EnvConfig& cfg, std::size_t count, std::uint64_t seed_base,
                                     const std::filesystem::path& dir) {
    cfg.validate();
    std::filesystem::create_directories(dir);
    std::vector<ManifestRow> rows;
    for (std::size_t i = 0; i < count; ++i) {
        const env::Episode ep = env::generate_episode(cfg, seed_base + i);
        ManifestRow row{ep.id, episode_file_name(ep.id), ep.y, ep.t_a, ep.length()};
        env::write_episode_file(ep, dir / row.file);
        rows.push_back(std::move(row));
    }
    const auto path = dir / "manifest.csv";
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << kManifestHeader << '\n';
    for (const auto& r : rows) {
        out << r.id << ',' << r.file << ',' << (r.y ? 1 : 0) << ',' << (r.t_a ? std::to_string(*r.t_a) : "") << ','
            << r.frames << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
    return rows;
}

std::vector<ManifestRow> read_manifest(const std::filesystem::path& dir) {
    const auto path = dir / "manifest.csv";
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line) || line != kManifestHeader) {
        throw num::FormatError(1, std::string("expected header '") + kManifestHeader + "' (" + path.string() + ")");
    }
    std::vector<ManifestRow> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        ManifestRow r;
        std::size_t id = 0, label = 0, t_a = 0;
        if (cells.size() != 5 || !num::parse_size(cells[0], id) || cells[1].empty() ||
            !num::parse_size(cells[2], label) || label > 1 || !num::parse_size(cells[4], r.frames)) {
            throw num::FormatError(line_no, "malformed manifest row (" + path.string() + ")");
        }
        r.id = id;
        r.file = cells[1];
        r.y = label == 1;
        if (!cells[3].empty()) {
            if (!num::parse_size(cells[3], t_a)) throw num::FormatError(line_no, "bad t_a (" + path.string() + ")");
            r.t_a = t_a;
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<env::Episode> load_dataset(const std::filesystem::path& dir) {
    std::vector<env::Episode> out;
    for (const auto& row : read_manifest(dir)) {
        env::Episode ep = env::load_episode_file(dir / row.file);
        if (ep.y != row.y || ep.t_a != row.t_a || ep.length() != row.frames) {
            throw std::runtime_error("episode file disagrees with its manifest row: " + (dir / row.file).string());
        }
        ep.id = row.id;
        out.push_back(std::move(ep));
    }
    return out;
}

DatasetSplit split_dataset(std::vector<env::Episode> episodes) {
    DatasetSplit s;
    for (std::size_t i = 0; i < episodes.size(); ++i) {
        (i % 5 == 4 ? s.eval : s.train).push_back(std::move(episodes[i]));
    }
    return s;
}

std::vector<env::Episode> generated_eval_set(const env::EnvConfig& cfg, std::size_t count, std::uint64_t seed_base) {
    std::vector<env::Episode> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(env::generate_episode(cfg, seed_base + i));
    return out;
}

std::uint64_t episode_set_hash(std::span<const env::Episode> episodes) {
    Fnv f;
    f.u64(episodes.size());
    for (const auto& ep : episodes) {
        f.u64(ep.id);
        f.u64(ep.y);
        f.u64(ep.t_a ? *ep.t_a + 1 : 0);
        f.f64(ep.fps);
        f.u64(ep.frames.size());
        for (const auto& fr : ep.frames) {
            f.u64(fr.height);
            f.u64(fr.width);
            for (double v : fr.cells) f.f64(v);
        }
        for (const auto& p : ep.fixation_track) {
            f.f64(p.x);
            f.f64(p.y);
        }
    }
    return f.h;
}

void check_compatible(const env::Episode& ep, const env::EnvConfig& cfg) {
    ep.validate();
    const auto& f = ep.frames.front();
    if (f.height != cfg.grid_h || f.width != cfg.grid_w) {
        throw std::invalid_argument("episode " + std::to_string(ep.id) + " has a " + std::to_string(f.height) + "x" +
                                    std::to_string(f.width) + " grid, config expects " + std::to_string(cfg.grid_h) +
                                    "x" + std::to_string(cfg.grid_w));
    }
}

}  // namespace darc::harness
