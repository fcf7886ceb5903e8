#include "darc/env/episode_io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "darc/num/serialize.hpp"

namespace darc::env {

using num::FormatError;
using num::format_double;
using num::parse_double;
using num::parse_size;

void write_episode(std::ostream& out, const Episode& ep) {
    ep.validate();
    const auto& f0 = ep.frames.front();
    out << "ADE1 " << f0.height << ' ' << f0.width << ' ' << ep.length() << ' ' << format_double(ep.fps) << ' '
        << (ep.y ? 1 : 0) << ' ';
    if (ep.t_a) {
        out << *ep.t_a;
    } else {
        out << -1;
    }
    out << '\n';
    std::string line;
    for (std::size_t t = 0; t < ep.length(); ++t) {
        line = "F " + std::to_string(t);
        for (double v : ep.frames[t].cells) {
            line += ' ';
            line += format_double(v);
        }
        line += ' ';
        line += format_double(ep.fixation_track[t].x);
        line += ' ';
        line += format_double(ep.fixation_track[t].y);
        line += '\n';
        out << line;
    }
}

Episode read_episode(std::istream& in) {
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line)) throw FormatError(1, "empty episode file");
    auto head = num::split_ws(line);
    if (head.empty() || head[0] != "ADE1") {
        throw FormatError(1, head.empty() ? "missing header" : "unsupported version '" + std::string(head[0]) + "'");
    }
    if (head.size() != 7) throw FormatError(1, "header expects 'ADE1 <H> <W> <T> <fps> <y> <t_a|-1>'");
    std::size_t h = 0, w = 0, T = 0;
    double fps = 0.0;
    if (!parse_size(head[1], h) || !parse_size(head[2], w) || !parse_size(head[3], T) || h == 0 || w == 0 ||
        T == 0) {
        throw FormatError(1, "bad grid or length");
    }
    if (!parse_double(head[4], fps) || !(fps > 0.0)) throw FormatError(1, "bad fps");
    if (head[5] != "0" && head[5] != "1") throw FormatError(1, "label must be 0 or 1");

    Episode ep;
    ep.fps = fps;
    ep.y = head[5] == "1";
    if (head[6] != "-1") {
        std::size_t t_a = 0;
        if (!parse_size(head[6], t_a)) throw FormatError(1, "bad accident frame");
        ep.t_a = t_a;
    }
    if (ep.y != ep.t_a.has_value()) throw FormatError(1, "accident frame must be given iff label is 1");
    if (ep.t_a && (*ep.t_a == 0 || *ep.t_a >= T)) throw FormatError(1, "accident frame outside (0, T)");

    const std::size_t cells = h * w;
    ep.frames.reserve(T);
    ep.fixation_track.reserve(T);
    for (std::size_t t = 0; t < T; ++t) {
        ++line_no;
        if (!std::getline(in, line)) {
            throw FormatError(line_no, "truncated: frame " + std::to_string(t) + " of " + std::to_string(T) +
                                           " missing");
        }
        auto tok = num::split_ws(line);
        const std::string where = "frame " + std::to_string(t) + ": ";
        std::size_t index = 0;
        if (tok.empty() || tok[0] != "F") throw FormatError(line_no, where + "expected frame record");
        if (tok.size() != cells + 4) {
            throw FormatError(line_no, where + "expected " + std::to_string(cells + 4) + " fields, found " +
                                           std::to_string(tok.size()));
        }
        if (!parse_size(tok[1], index) || index != t) throw FormatError(line_no, where + "frame index out of order");
        SaliencyField f(h, w, 0.0, t);
        for (std::size_t i = 0; i < cells; ++i) {
            double v = 0.0;
            if (!parse_double(tok[2 + i], v) || !(v >= 0.0) || !std::isfinite(v)) {
                throw FormatError(line_no, where + "cell " + std::to_string(i) + " is not a finite nonnegative value");
            }
            f.cells[i] = v;
        }
        Point p;
        if (!parse_double(tok[cells + 2], p.x) || !parse_double(tok[cells + 3], p.y)) {
            throw FormatError(line_no, where + "bad fixation coordinates");
        }
        if (!in_unit_square(p)) {
            throw FormatError(line_no, where + "fixation (" + std::string(tok[cells + 2]) + ", " +
                                           std::string(tok[cells + 3]) + ") outside [0,1]^2");
        }
        ep.frames.push_back(std::move(f));
        ep.fixation_track.push_back(p);
    }
    while (std::getline(in, line)) {
        ++line_no;
        if (!num::split_ws(line).empty()) throw FormatError(line_no, "unexpected record after final frame");
    }
    return ep;
}

void write_episode_file(const Episode& ep, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_episode(out, ep);
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

Episode load_episode_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    try {
        return read_episode(in);
    } catch (const FormatError& e) {
        throw FormatError(e.line(), e.detail() + " (" + path.string() + ")");
    }
}

}  // namespace darc::env
