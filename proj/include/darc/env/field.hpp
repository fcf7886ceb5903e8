#pragma once

#include <cstddef>
#include <vector>

namespace darc::env {

/// Point in normalized image coordinates: x runs along columns, y along rows,
/// both in [0, 1].
struct Point {
    double x = 0.5;
    double y = 0.5;

    bool operator==(const Point&) const = default;
};

inline bool in_unit_square(Point p) { return p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0; }
inline double squared_distance(Point a, Point b) {
    const double dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

/// Nonnegative H x W attention map for one frame, row-major.
struct SaliencyField {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<double> cells;
    std::size_t frame_index = 0;

    SaliencyField() = default;
    SaliencyField(std::size_t h, std::size_t w, double fill = 0.0, std::size_t frame = 0)
        : height(h), width(w), cells(h * w, fill), frame_index(frame) {}

    double& at(std::size_t row, std::size_t col) { return cells[row * width + col]; }
    double at(std::size_t row, std::size_t col) const { return cells[row * width + col]; }

    /// Normalized coordinates of a cell center.
    double center_x(std::size_t col) const { return (static_cast<double>(col) + 0.5) / static_cast<double>(width); }
    double center_y(std::size_t row) const { return (static_cast<double>(row) + 0.5) / static_cast<double>(height); }

    double sum() const;
    bool same_grid(const SaliencyField& o) const { return height == o.height && width == o.width; }

    bool operator==(const SaliencyField&) const = default;
};

/// Divides by the total mass. Throws std::invalid_argument if the field has a
/// negative or non-finite entry or zero total mass.
SaliencyField normalized(SaliencyField f);

}  // namespace darc::env
