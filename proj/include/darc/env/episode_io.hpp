#pragma once

#include <filesystem>
#include <iosfwd>

#include "darc/env/episode.hpp"

namespace darc::env {

// Episode text format (UTF-8, one record per line):
//
//   ADE1 <H> <W> <T> <fps> <y> <t_a|-1>
//   F <t> <H*W cell values, row-major> <p_x> <p_y>     (T lines, t = 0..T-1)
//
// Floats carry 17 significant digits so a write/load cycle is bit-exact.
// Loading is all-or-nothing: any malformed record raises num::FormatError
// naming the line (and frame, where applicable).

void write_episode(std::ostream& out, const Episode& ep);
Episode read_episode(std::istream& in);

void write_episode_file(const Episode& ep, const std::filesystem::path& path);
Episode load_episode_file(const std::filesystem::path& path);

}  // namespace darc::env
