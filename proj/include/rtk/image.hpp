#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "rtk/errors.hpp"

namespace rtk {

/// Square pixel grid over the physical domain [-h,h] x [-h,h].
/// Row index i runs along the vertical axis, column index j along the
/// horizontal axis; pixel (i,j) is centered at
///   ( -h + (j+0.5)*pixel_size , -h + (i+0.5)*pixel_size ).
struct ImageGrid {
    int n = 0;               ///< pixels per side
    double half_width = 0;   ///< physical half-extent h

    ImageGrid() = default;
    ImageGrid(int n_, double half_width_) : n(n_), half_width(half_width_) {
        if (n < 2) throw InvalidParameterError("ImageGrid: n must be >= 2");
        if (!(half_width > 0)) throw InvalidParameterError("ImageGrid: half_width must be > 0");
    }

    double pixel_size() const { return 2.0 * half_width / n; }

    std::pair<double, double> pixel_center(int i, int j) const {
        const double px = pixel_size();
        return {-half_width + (j + 0.5) * px, -half_width + (i + 0.5) * px};
    }

    std::size_t pixel_count() const { return static_cast<std::size_t>(n) * n; }

    friend bool operator==(const ImageGrid& a, const ImageGrid& b) {
        return a.n == b.n && a.half_width == b.half_width;
    }
    friend bool operator!=(const ImageGrid& a, const ImageGrid& b) { return !(a == b); }
};

/// Real-valued image on an ImageGrid, stored row-major.
struct Image {
    ImageGrid grid;
    std::vector<double> values;

    Image() = default;
    explicit Image(const ImageGrid& g) : grid(g), values(g.pixel_count(), 0.0) {}
    Image(const ImageGrid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
        if (values.size() != grid.pixel_count())
            throw DimensionMismatchError("Image: value count does not match grid");
    }

    double& at(int i, int j) { return values[static_cast<std::size_t>(i) * grid.n + j]; }
    double at(int i, int j) const { return values[static_cast<std::size_t>(i) * grid.n + j]; }
};

struct ImageStats {
    double min = 0;
    double max = 0;
    double mean = 0;
    double mean_abs = 0;
};

/// Elementwise min/max/mean and mean of absolute values.
inline ImageStats image_stats(const Image& x) {
    ImageStats s;
    if (x.values.empty()) return s;
    s.min = x.values[0];
    s.max = x.values[0];
    double sum = 0, sum_abs = 0;
    for (double v : x.values) {
        if (v < s.min) s.min = v;
        if (v > s.max) s.max = v;
        sum += v;
        sum_abs += std::abs(v);
    }
    s.mean = sum / static_cast<double>(x.values.size());
    s.mean_abs = sum_abs / static_cast<double>(x.values.size());
    return s;
}

inline void check_same_grid(const Image& a, const Image& b) {
    if (a.grid != b.grid) throw DimensionMismatchError("images live on different grids");
}

inline double dot(const Image& a, const Image& b) {
    check_same_grid(a, b);
    double s = 0;
    for (std::size_t k = 0; k < a.values.size(); ++k) s += a.values[k] * b.values[k];
    return s;
}

inline double norm(const Image& a) {
    double s = 0;
    for (double v : a.values) s += v * v;
    return std::sqrt(s);
}

inline bool all_finite(const Image& a) {
    for (double v : a.values)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace rtk
