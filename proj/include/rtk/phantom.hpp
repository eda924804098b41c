#pragma once

#include <algorithm>
#include <cmath>

#include "rtk/image.hpp"

namespace rtk {

/// Rotated ellipse with an additive amplitude, in physical coordinates.
struct EllipseSpec {
    double cx = 0;         ///< center x
    double cy = 0;         ///< center y
    double a = 1;          ///< semi-axis along the rotated u direction
    double b = 1;          ///< semi-axis along the rotated v direction
    double angle = 0;      ///< rotation in radians
    double amplitude = 0;  ///< value added inside the ellipse
};

/// Adds spec.amplitude to every pixel whose center lies inside the ellipse.
/// Membership is a pixel-center test; overlapping rasterizations add up.
inline Image rasterize_ellipse(const ImageGrid& grid, const EllipseSpec& spec, Image target) {
    if (!(spec.a > 0) || !(spec.b > 0))
        throw InvalidSpecError("rasterize_ellipse: semi-axes must be positive");
    if (target.grid != grid)
        throw DimensionMismatchError("rasterize_ellipse: target grid mismatch");

    const double c = std::cos(spec.angle);
    const double s = std::sin(spec.angle);
    for (int i = 0; i < grid.n; ++i) {
        for (int j = 0; j < grid.n; ++j) {
            const auto [x, y] = grid.pixel_center(i, j);
            const double dx = x - spec.cx;
            const double dy = y - spec.cy;
            // rotate by -angle into the ellipse frame
            const double u = c * dx + s * dy;
            const double v = -s * dx + c * dy;
            const double q = (u / spec.a) * (u / spec.a) + (v / spec.b) * (v / spec.b);
            if (q <= 1.0) target.at(i, j) += spec.amplitude;
        }
    }
    return target;
}

/// Deterministic test phantom in [0,1]: an elliptical ring near the domain
/// boundary, an "A"-like glyph of three thin ellipses in the upper half, and
/// one small low-contrast ellipse in the lower half.
inline Image make_paper_phantom(const ImageGrid& grid) {
    if (grid.n < 32) throw GridTooCoarseError("make_paper_phantom: need n >= 32");

    const double h = grid.half_width;
    Image x(grid);

    // Ring: outer ellipse minus a concentric inner one. The physical
    // thickness equals 3 pixels of a 128-wide grid regardless of n.
    const double thick = 3.0 * (2.0 * h / 128.0);
    x = rasterize_ellipse(grid, {0.0, 0.0, 0.88 * h, 0.78 * h, 0.10, 1.0}, std::move(x));
    x = rasterize_ellipse(grid, {0.0, 0.0, 0.88 * h - thick, 0.78 * h - thick, 0.10, -1.0},
                          std::move(x));

    // "A" glyph in the upper half: two legs meeting at an apex plus a crossbar.
    const double apex_y = 0.52 * h;
    const double splay = 0.35;  // leg tilt from vertical, radians
    const double leg_len = 0.16 * h;
    const double leg_w = 0.016 * h;
    const double lx = std::sin(splay) * leg_len;
    const double ly = std::cos(splay) * leg_len;
    const double pi = 3.14159265358979323846;
    x = rasterize_ellipse(grid, {lx, apex_y - ly, leg_len, leg_w, pi / 2 - splay, 1.0},
                          std::move(x));
    x = rasterize_ellipse(grid, {-lx, apex_y - ly, leg_len, leg_w, pi / 2 + splay, 1.0},
                          std::move(x));
    x = rasterize_ellipse(grid, {0.0, 0.30 * h, 0.09 * h, 0.013 * h, 0.0, 1.0}, std::move(x));

    // Small low-contrast ellipse in the lower half.
    x = rasterize_ellipse(grid, {0.28 * h, -0.42 * h, 0.13 * h, 0.085 * h, 0.6, 0.5},
                          std::move(x));

    for (double& v : x.values) v = std::clamp(v, 0.0, 1.0);
    return x;
}

}  // namespace rtk
