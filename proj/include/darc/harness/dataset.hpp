#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "darc/env/episode.hpp"

namespace darc::harness {

/// One line of manifest.csv: id,file,label,t_a,frames (t_a empty for negatives).
struct ManifestRow {
    std::uint64_t id = 0;
    std::string file;
    bool y = false;
    std::optional<std::size_t> t_a;
    std::size_t frames = 0;
    bool operator==(const ManifestRow&) const = default;
};

std::string episode_file_name(std::uint64_t id);

/// Writes episodes generated with seeds seed_base .. seed_base + count - 1
/// plus manifest.csv. Episode ids equal their seeds.
std::vector<ManifestRow> gen_dataset(const env::EnvConfig& cfg, std::size_t count, std::uint64_t seed_base,
                                     const std::filesystem::path& dir);

std::vector<ManifestRow> read_manifest(const std::filesystem::path& dir);
/// Loads every manifest entry in manifest order; ids come from the manifest.
/// Each episode must match its manifest label and t_a.
std::vector<env::Episode> load_dataset(const std::filesystem::path& dir);

struct DatasetSplit {
    std::vector<env::Episode> train;
    std::vector<env::Episode> eval;
};
/// Manifest positions with index % 5 == 4 are held out for evaluation.
DatasetSplit split_dataset(std::vector<env::Episode> episodes);

std::vector<env::Episode> generated_eval_set(const env::EnvConfig& cfg, std::size_t count, std::uint64_t seed_base);

/// FNV-1a over ids, labels, t_a, fps, fixations and every cell.
std::uint64_t episode_set_hash(std::span<const env::Episode> episodes);

/// Throws std::invalid_argument if an episode's grid or length is unusable
/// with `cfg` (grid must equal cfg.grid_h x cfg.grid_w).
void check_compatible(const env::Episode& ep, const env::EnvConfig& cfg);

}  // namespace darc::harness
