#pragma once

#include <algorithm>
#include <cmath>

#include "rtk/image.hpp"
#include "rtk/sinogram.hpp"

namespace rtk {

/// Forward-difference gradient of an image with Neumann boundaries:
/// the last column of dx and the last row of dy are identically zero.
struct GradientField {
    ImageGrid grid;
    std::vector<double> dx, dy;

    GradientField() = default;
    explicit GradientField(const ImageGrid& g)
        : grid(g), dx(g.pixel_count(), 0.0), dy(g.pixel_count(), 0.0) {}
};

inline void check_same_grid(const GradientField& a, const GradientField& b) {
    if (a.grid != b.grid) throw DimensionMismatchError("gradient fields on different grids");
}

inline double dot(const GradientField& a, const GradientField& b) {
    check_same_grid(a, b);
    double s = 0;
    for (std::size_t k = 0; k < a.dx.size(); ++k) s += a.dx[k] * b.dx[k] + a.dy[k] * b.dy[k];
    return s;
}

inline double norm(const GradientField& a) {
    double s = 0;
    for (std::size_t k = 0; k < a.dx.size(); ++k) s += a.dx[k] * a.dx[k] + a.dy[k] * a.dy[k];
    return std::sqrt(s);
}

/// dx[i,j] = x[i,j+1]-x[i,j] (j<n-1), dy[i,j] = x[i+1,j]-x[i,j] (i<n-1).
/// Unit pixel-index spacing, no physical scaling.
inline GradientField gradient(const Image& x) {
    const int n = x.grid.n;
    GradientField g(x.grid);
    for (int i = 0; i < n; ++i) {
        const std::size_t row = static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n - 1; ++j) g.dx[row + j] = x.values[row + j + 1] - x.values[row + j];
        if (i < n - 1)
            for (int j = 0; j < n; ++j) g.dy[row + j] = x.values[row + n + j] - x.values[row + j];
    }
    return g;
}

/// Negative adjoint of gradient: <gradient(x), g> == -<x, divergence(g)> exactly.
inline Image divergence(const GradientField& g) {
    const int n = g.grid.n;
    Image out(g.grid);
    for (int i = 0; i < n; ++i) {
        const std::size_t row = static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            double d = 0;
            if (j < n - 1) d += g.dx[row + j];
            if (j > 0) d -= g.dx[row + j - 1];
            if (i < n - 1) d += g.dy[row + j];
            if (i > 0) d -= g.dy[row - n + j];
            out.values[row + j] = d;
        }
    }
    return out;
}

/// Isotropic total variation: sum over pixels of |(dx,dy)|_2.
inline double tv_value(const Image& x) {
    const GradientField g = gradient(x);
    double s = 0;
    for (std::size_t k = 0; k < g.dx.size(); ++k)
        s += std::sqrt(g.dx[k] * g.dx[k] + g.dy[k] * g.dy[k]);
    return s;
}

/// Pointwise projection of each 2-vector onto the Euclidean ball of radius
/// alpha: v -> v * alpha / max(alpha, |v|). alpha == 0 yields the zero field.
inline GradientField prox_tv_dual(GradientField g, double alpha) {
    if (alpha < 0) throw InvalidParameterError("prox_tv_dual: alpha must be >= 0");
    if (alpha == 0) {
        std::fill(g.dx.begin(), g.dx.end(), 0.0);
        std::fill(g.dy.begin(), g.dy.end(), 0.0);
        return g;
    }
    for (std::size_t k = 0; k < g.dx.size(); ++k) {
        const double mag = std::sqrt(g.dx[k] * g.dx[k] + g.dy[k] * g.dy[k]);
        if (mag > alpha) {
            const double scale = alpha / mag;
            g.dx[k] *= scale;
            g.dy[k] *= scale;
        }
    }
    return g;
}

/// Elementwise projection onto the nonnegative orthant.
inline Image prox_nonneg(Image x) {
    for (double& v : x.values) v = std::max(v, 0.0);
    return x;
}

/// Proximal map of the convex conjugate of f(v) = |v - b|^2 (no 1/2 factor):
/// f*(q) = <q,b> + |q|^2/4, so prox_{sigma f*}(p) = (p - sigma*b)/(1 + sigma/2).
inline Sinogram prox_fidelity_conjugate(Sinogram p, double sigma, const Sinogram& b) {
    if (!(sigma > 0)) throw InvalidParameterError("prox_fidelity_conjugate: sigma must be > 0");
    check_same_shape(p, b);
    const double denom = 1.0 + sigma / 2.0;
    for (std::size_t k = 0; k < p.values.size(); ++k)
        p.values[k] = (p.values[k] - sigma * b.values[k]) / denom;
    return p;
}

}  // namespace rtk
