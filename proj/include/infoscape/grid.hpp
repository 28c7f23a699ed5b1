// Planar geometry: points, padded bounding boxes, and the uniform grids that
// discretize the semantic plane. A grid cell (i, j) covers the half-open box
// [x_i, x_{i+1}) x [y_j, y_{j+1}); the final row/column is closed so every
// in-bounds point maps to exactly one cell.
#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

namespace infoscape {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

struct Bounds {
    double min_x = 0.0, min_y = 0.0;
    double max_x = 0.0, max_y = 0.0;

    bool contains(Point2 p) const {
        return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
    }
    double width() const { return max_x - min_x; }
    double height() const { return max_y - min_y; }
};

// Tight box around the points, expanded by 1e-9 + 1e-6 * range per axis on
// both sides. The padding keeps boundary points strictly interior.
inline Bounds padded_bounds(std::span<const Point2> points) {
    if (points.empty()) throw std::invalid_argument("padded_bounds: no points");
    Bounds b{points[0].x, points[0].y, points[0].x, points[0].y};
    for (const Point2& p : points) {
        if (p.x < b.min_x) b.min_x = p.x;
        if (p.x > b.max_x) b.max_x = p.x;
        if (p.y < b.min_y) b.min_y = p.y;
        if (p.y > b.max_y) b.max_y = p.y;
    }
    double pad_x = 1e-9 + 1e-6 * (b.max_x - b.min_x);
    double pad_y = 1e-9 + 1e-6 * (b.max_y - b.min_y);
    b.min_x -= pad_x;
    b.max_x += pad_x;
    b.min_y -= pad_y;
    b.max_y += pad_y;
    return b;
}

struct GridSpec {
    int gx = 500;
    int gy = 500;
    Bounds bounds;

    GridSpec() = default;
    GridSpec(int gx_, int gy_, Bounds b) : gx(gx_), gy(gy_), bounds(b) {
        if (gx < 1 || gy < 1) throw std::invalid_argument("GridSpec: grid dims must be >= 1");
    }

    int64_t cell_count() const { return static_cast<int64_t>(gx) * gy; }

    int64_t flat_index(int ix, int iy) const { return static_cast<int64_t>(iy) * gx + ix; }

    std::pair<int, int> cell_xy(int64_t flat) const {
        return {static_cast<int>(flat % gx), static_cast<int>(flat / gx)};
    }

    // floor((p - min) / cell_width), clamped into range. Throws when the
    // point lies outside the bounds (the bounds must be rebuilt).
    int64_t cell_of(Point2 p) const {
        if (!bounds.contains(p)) {
            throw std::out_of_range("GridSpec::cell_of: point (" + std::to_string(p.x) + ", " +
                                    std::to_string(p.y) + ") outside grid bounds");
        }
        double wx = bounds.width() / gx;
        double wy = bounds.height() / gy;
        int ix = static_cast<int>((p.x - bounds.min_x) / wx);
        int iy = static_cast<int>((p.y - bounds.min_y) / wy);
        if (ix < 0) ix = 0;
        if (ix >= gx) ix = gx - 1;
        if (iy < 0) iy = 0;
        if (iy >= gy) iy = gy - 1;
        return flat_index(ix, iy);
    }
};

}  // namespace infoscape
