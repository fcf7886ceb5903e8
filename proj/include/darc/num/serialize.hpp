#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "darc/num/tensor.hpp"

namespace darc::num {

/// Parse failure in one of the text formats; carries the 1-based line.
class FormatError : public std::runtime_error {
public:
    FormatError(std::size_t line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line), detail_(message) {}
    std::size_t line() const { return line_; }
    const std::string& detail() const { return detail_; }

private:
    std::size_t line_;
    std::string detail_;
};

/// 17 significant digits; round-trips every finite double exactly.
std::string format_double(double v);
/// Strict parse of a whole token. Returns false on any trailing junk.
bool parse_double(std::string_view token, double& out);
bool parse_size(std::string_view token, std::size_t& out);

std::vector<std::string_view> split_ws(std::string_view line);

// ParamSet text format, version 1:
//
//   PSET 1 <entry-count>
//   <name> <rank> <dim_0> ... <dim_{rank-1}> <value> ... <value>
//
// One entry per line, values row-major with 17 significant digits.
void write_params(std::ostream& out, const ParamSet& params);
/// Reads one ParamSet block starting at the stream's current line.
/// `line_no` is advanced past the lines consumed.
ParamSet read_params(std::istream& in, std::size_t& line_no);

void save_params(const std::filesystem::path& path, const ParamSet& params);
ParamSet load_params(const std::filesystem::path& path);

}  // namespace darc::num
