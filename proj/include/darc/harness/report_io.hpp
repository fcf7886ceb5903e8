#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include "darc/env/episode.hpp"
#include "darc/harness/runner.hpp"
#include "json.hpp"

namespace darc::harness {

std::string hex64(std::uint64_t v);

/// Pretty-printed with a trailing newline; byte-stable for equal input.
void write_json_file(const std::filesystem::path& path, const nlohmann::ordered_json& j);
nlohmann::ordered_json read_json_file(const std::filesystem::path& path);

void write_curve_csv(const std::filesystem::path& path, std::span<const CurvePoint> curve);

/// trace_<id>.csv: a comment line "# episode=<id> y=<0|1> t_a=<frame|none> fps=<fps>",
/// then columns t,score,w_t,r_A,r_F,p_hat_x,p_hat_y,p_x,p_y, one row per frame.
void write_trace(const std::filesystem::path& dir, std::span<const metrics::FrameRecord> records,
                 std::span<const FrameRewards> rewards);
/// Splits a rollout by episode and writes one trace per episode.
void write_traces(const std::filesystem::path& dir, const Rollout& r);

}  // namespace darc::harness
