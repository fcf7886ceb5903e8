#include "darc/num/serialize.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

namespace darc::num {

std::string format_double(double v) {
    char buf[32];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
    return {buf, static_cast<std::size_t>(n)};
}

bool parse_double(std::string_view token, double& out) {
    if (token.empty()) return false;
    const char* first = token.data();
    const char* last = first + token.size();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

bool parse_size(std::string_view token, std::size_t& out) {
    if (token.empty()) return false;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
    return ec == std::errc() && ptr == token.data() + token.size();
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

void write_params(std::ostream& out, const ParamSet& params) {
    out << "PSET 1 " << params.size() << '\n';
    for (const auto& e : params.entries) {
        out << e.name << ' ' << e.value.rank();
        for (auto d : e.value.shape()) out << ' ' << d;
        for (double v : e.value.data()) out << ' ' << format_double(v);
        out << '\n';
    }
}

ParamSet read_params(std::istream& in, std::size_t& line_no) {
    std::string line;
    if (!std::getline(in, line)) throw FormatError(line_no + 1, "missing PSET header");
    ++line_no;
    auto head = split_ws(line);
    std::size_t count = 0;
    if (head.size() != 3 || head[0] != "PSET") throw FormatError(line_no, "expected 'PSET <version> <count>'");
    if (head[1] != "1") throw FormatError(line_no, "unsupported PSET version " + std::string(head[1]));
    if (!parse_size(head[2], count)) throw FormatError(line_no, "bad entry count");

    ParamSet params;
    for (std::size_t e = 0; e < count; ++e) {
        if (!std::getline(in, line)) throw FormatError(line_no + 1, "truncated: expected " +
                                                                        std::to_string(count) + " entries");
        ++line_no;
        auto tok = split_ws(line);
        std::size_t rank = 0;
        if (tok.size() < 2 || !parse_size(tok[1], rank)) throw FormatError(line_no, "bad entry header");
        if (tok.size() < 2 + rank) throw FormatError(line_no, "missing shape");
        std::vector<std::size_t> shape(rank);
        std::size_t n = 1;
        for (std::size_t d = 0; d < rank; ++d) {
            if (!parse_size(tok[2 + d], shape[d])) throw FormatError(line_no, "bad dimension");
            n *= shape[d];
        }
        if (tok.size() != 2 + rank + n) {
            throw FormatError(line_no, "entry '" + std::string(tok[0]) + "' expects " + std::to_string(n) +
                                           " values, found " + std::to_string(tok.size() - 2 - rank));
        }
        std::vector<double> data(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (!parse_double(tok[2 + rank + i], data[i])) throw FormatError(line_no, "bad value");
        }
        params.entries.push_back({std::string(tok[0]), Tensor(std::move(shape), std::move(data))});
    }
    return params;
}

void save_params(const std::filesystem::path& path, const ParamSet& params) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_params(out, params);
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

ParamSet load_params(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::size_t line = 0;
    return read_params(in, line);
}

}  // namespace darc::num
