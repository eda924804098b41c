#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>

#include "rtk/image.hpp"
#include "rtk/random.hpp"
#include "rtk/sinogram.hpp"

namespace rtk {

/// Matrix-free linear map Image -> Sinogram together with its exact adjoint.
/// The adjoint must be the transpose of the same discretization weights, so
/// that <apply(x), u> == <x, adjoint(u)> up to rounding.
struct LinearOperatorChain {
    ImageGrid domain;
    std::function<Sinogram(const Image&)> apply;
    std::function<Image(const Sinogram&)> adjoint;
    std::string descriptor;
};

/// Seeded random image with i.i.d. standard normal entries.
inline Image random_image(const ImageGrid& grid, std::uint64_t seed) {
    Image x(grid);
    GaussianStream g(seed);
    for (double& v : x.values) v = g.next();
    return x;
}

/// Seeded random sinogram with i.i.d. standard normal entries.
inline Sinogram random_sinogram(const DetectorGeometry& geom, const TimeGrid& time,
                                std::uint64_t seed) {
    Sinogram s(geom, time);
    GaussianStream g(seed);
    for (double& v : s.values) v = g.next();
    return s;
}

/// Largest singular value of an operator given through its normal map
/// x -> A^T A x, estimated by power iteration from a seeded random start.
/// Stops after `iterations` steps or when successive estimates differ by
/// less than `tol` relatively. A degenerate zero operator returns 0.
inline double power_iteration_norm(const ImageGrid& grid,
                                   const std::function<Image(const Image&)>& normal_op,
                                   int iterations, double tol, std::uint64_t seed) {
    if (iterations < 1) throw InvalidParameterError("power_iteration_norm: iterations >= 1");
    Image x = random_image(grid, seed);
    double nx = norm(x);
    if (nx == 0) return 0.0;
    for (double& v : x.values) v /= nx;

    double lambda = 0.0;
    for (int it = 0; it < iterations; ++it) {
        Image y = normal_op(x);
        const double ny = norm(y);
        if (ny == 0) return 0.0;
        const double prev = lambda;
        lambda = ny;  // Rayleigh estimate for the unit-norm x
        for (double& v : y.values) v /= ny;
        x = std::move(y);
        if (it > 0 && std::abs(lambda - prev) < tol * lambda) break;
    }
    return std::sqrt(lambda);
}

/// Largest singular value of an operator chain.
inline double operator_norm(const LinearOperatorChain& op, int iterations, double tol,
                            std::uint64_t seed) {
    return power_iteration_norm(
        op.domain, [&op](const Image& x) { return op.adjoint(op.apply(x)); }, iterations,
        tol, seed);
}

/// Identity map packaged as a chain: the n*n pixels are reinterpreted as an
/// n-detector, n-sample sinogram. Handy for exercising the solver against
/// closed-form solutions.
inline LinearOperatorChain identity_chain(const ImageGrid& grid) {
    const DetectorGeometry geom(grid.n, 1.0);
    const TimeGrid time(grid.n, 1.0, 1.0);
    LinearOperatorChain c;
    c.domain = grid;
    c.descriptor = "identity";
    c.apply = [grid, geom, time](const Image& x) {
        if (x.grid != grid) throw DimensionMismatchError("identity_chain: grid mismatch");
        return Sinogram(geom, time, x.values);
    };
    c.adjoint = [grid, geom, time](const Sinogram& u) {
        if (u.geometry != geom || u.time != time)
            throw DimensionMismatchError("identity_chain: sinogram shape mismatch");
        return Image(grid, u.values);
    };
    return c;
}

/// Relative adjoint-test residual |<Ax,u> - <x,A'u>| / (|Ax| |u|) on one
/// seeded random pair.
inline double adjoint_test_residual(const LinearOperatorChain& op,
                                    const DetectorGeometry& geom, const TimeGrid& time,
                                    std::uint64_t seed) {
    const Image x = random_image(op.domain, seed);
    const Sinogram u = random_sinogram(geom, time, seed + 0x9e3779b97f4a7c15ULL);
    const Sinogram ax = op.apply(x);
    const Image atu = op.adjoint(u);
    const double lhs = dot(ax, u);
    const double rhs = dot(x, atu);
    const double scale = norm(ax) * norm(u);
    if (scale == 0) return std::abs(lhs - rhs);
    return std::abs(lhs - rhs) / scale;
}

}  // namespace rtk
