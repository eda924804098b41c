#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rtk/image.hpp"
#include "rtk/operator.hpp"
#include "rtk/sinogram.hpp"

namespace rtk {

/// Central differences in time, one-sided first-order at both ends.
inline Sinogram time_derivative(const Sinogram& s) {
    const int T = s.time.samples;
    if (T < 3) throw TooFewSamplesError("time_derivative: need at least 3 samples");
    const double dt = s.time.dt;
    Sinogram out(s.geometry, s.time);
    for (int m = 0; m < s.geometry.count; ++m) {
        const double* row = s.values.data() + static_cast<std::size_t>(m) * T;
        double* o = out.values.data() + static_cast<std::size_t>(m) * T;
        o[0] = (row[1] - row[0]) / dt;
        for (int k = 1; k < T - 1; ++k) o[k] = (row[k + 1] - row[k - 1]) / (2.0 * dt);
        o[T - 1] = (row[T - 1] - row[T - 2]) / dt;
    }
    return out;
}

/// Exact transpose of time_derivative (scatter of the same stencil weights).
inline Sinogram time_derivative_adjoint(const Sinogram& u) {
    const int T = u.time.samples;
    if (T < 3) throw TooFewSamplesError("time_derivative_adjoint: need at least 3 samples");
    const double dt = u.time.dt;
    Sinogram out(u.geometry, u.time);
    for (int m = 0; m < u.geometry.count; ++m) {
        const double* row = u.values.data() + static_cast<std::size_t>(m) * T;
        double* o = out.values.data() + static_cast<std::size_t>(m) * T;
        o[0] += -row[0] / dt;
        o[1] += row[0] / dt;
        for (int k = 1; k < T - 1; ++k) {
            o[k - 1] -= row[k] / (2.0 * dt);
            o[k + 1] += row[k] / (2.0 * dt);
        }
        o[T - 2] -= row[T - 1] / dt;
        o[T - 1] += row[T - 1] / dt;
    }
    return out;
}

/// Matrix-free 2D PAT forward operator: arc-length integrals of the image
/// over circles of radius c*t_k centered at each detector, followed by a
/// temporal derivative. The adjoint scatters exactly the same quadrature
/// weights, detector by detector in fixed order, so results are bit-stable
/// across thread counts.
class PatForwardModel {
  public:
    PatForwardModel(const ImageGrid& grid, const DetectorGeometry& geom,
                    const TimeGrid& time, double oversample = 1.0)
        : grid_(grid), geom_(geom), time_(time) {
        if (!(oversample > 0))
            throw InvalidParameterError("PatForwardModel: oversample must be > 0");
        if (!(geom.radius > grid.half_width))
            throw InvalidParameterError(
                "PatForwardModel: detector radius must exceed the grid half-width");
        const double reach = geom.radius + grid.half_width * std::sqrt(2.0);
        if (time.c * time.t(time.samples - 1) < reach * (1.0 - 1e-12))
            throw InvalidParameterError(
                "PatForwardModel: time axis too short to traverse the whole domain");
        build_tables(oversample);
    }

    const ImageGrid& grid() const { return grid_; }
    const DetectorGeometry& geometry() const { return geom_; }
    const TimeGrid& time() const { return time_; }

    /// Arc-length integrals: entry (m,k) integrates the bilinearly
    /// interpolated image over the circle of radius c*t_k around detector m.
    Sinogram circular_mean(const Image& x) const {
        check_image(x);
        Sinogram out(geom_, time_);
        const int M = geom_.count;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (int m = 0; m < M; ++m) {
            for (int k = 1; k < time_.samples; ++k) {
                if (arc_[k].count == 0) continue;
                double acc = 0;
                visit_row(m, k, [&](std::size_t px, double w) { acc += w * x.values[px]; });
                out.at(m, k) = acc * arc_[k].element;
            }
        }
        return out;
    }

    /// Exact transpose of circular_mean.
    Image circular_mean_adjoint(const Sinogram& u) const {
        check_sinogram(u);
        const int M = geom_.count;
        const std::size_t N = grid_.pixel_count();
        std::vector<std::vector<double>> partial(static_cast<std::size_t>(M));
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (int m = 0; m < M; ++m) {
            auto& img = partial[m];
            img.assign(N, 0.0);
            for (int k = 1; k < time_.samples; ++k) {
                if (arc_[k].count == 0) continue;
                const double coeff = u.at(m, k) * arc_[k].element;
                if (coeff == 0) continue;
                visit_row(m, k, [&](std::size_t px, double w) { img[px] += w * coeff; });
            }
        }
        Image out(grid_);
        for (int m = 0; m < M; ++m)
            for (std::size_t p = 0; p < N; ++p) out.values[p] += partial[m][p];
        return out;
    }

    Sinogram forward(const Image& x) const { return time_derivative(circular_mean(x)); }

    Image adjoint(const Sinogram& u) const {
        return circular_mean_adjoint(time_derivative_adjoint(u));
    }

    /// Operator chain sharing ownership of this model.
    static LinearOperatorChain chain(std::shared_ptr<const PatForwardModel> model) {
        LinearOperatorChain c;
        c.domain = model->grid_;
        c.descriptor = "pat_forward";
        c.apply = [model](const Image& x) { return model->forward(x); };
        c.adjoint = [model](const Sinogram& u) { return model->adjoint(u); };
        return c;
    }

    /// Convenience chain over a copy of this model.
    LinearOperatorChain chain() const {
        return chain(std::make_shared<const PatForwardModel>(*this));
    }

  private:
    struct ArcTable {
        int count = 0;        ///< samples on the full circle (0 when r == 0)
        double element = 0;   ///< arc element r * dtheta
        double radius = 0;
        std::size_t offset = 0;  ///< into the shared coordinate pools
    };
    struct Range {
        std::int32_t start = 0;  ///< first sample index, already in [0, count)
        std::int32_t len = 0;    ///< window length; may wrap past the pool end
    };

    void build_tables(double oversample) {
        const int T = time_.samples;
        const double px = grid_.pixel_size();
        const double step = px / (2.0 * oversample);
        arc_.resize(static_cast<std::size_t>(T));
        std::size_t total = 0;
        for (int k = 1; k < T; ++k) {
            const double r = time_.c * time_.t(k);
            ArcTable& a = arc_[k];
            a.radius = r;
            a.count = std::max(16, static_cast<int>(std::ceil(2.0 * kPi * r / step)));
            a.element = r * (2.0 * kPi / a.count);
            a.offset = total;
            total += static_cast<std::size_t>(a.count);
        }
        // Pools hold the sample coordinates already scaled to pixel units:
        // uc = r*cos(theta)/px, vc likewise, so the inner loop is adds only.
        const double inv_px = 1.0 / px;
        uc_.resize(total);
        vc_.resize(total);
        for (int k = 1; k < T; ++k) {
            const ArcTable& a = arc_[k];
            const double dth = 2.0 * kPi / a.count;
            const double s = a.radius * inv_px;
            for (int i = 0; i < a.count; ++i) {
                const double th = (i + 0.5) * dth;
                uc_[a.offset + i] = s * std::cos(th);
                vc_[a.offset + i] = s * std::sin(th);
            }
        }

        // Conservative per-(m,k) angular windows: only samples within the
        // bounding circle of the (slightly padded) image square can touch a
        // pixel. Samples outside the window are provably zero and skipped.
        const double rho = (grid_.half_width + 2.0 * px) * std::sqrt(2.0);
        const double R = geom_.radius;
        ranges_.resize(static_cast<std::size_t>(geom_.count) * T);
        for (int m = 0; m < geom_.count; ++m) {
            const double theta_m = geom_.angle(m);
            for (int k = 1; k < T; ++k) {
                const ArcTable& a = arc_[k];
                Range& rg = ranges_[static_cast<std::size_t>(m) * T + k];
                const double r = a.radius;
                const double kappa = (rho * rho - r * r - R * R) / (2.0 * r * R);
                if (kappa <= -1.0) {
                    rg = {0, 0};
                    continue;
                }
                if (kappa >= 1.0) {
                    rg = {0, a.count};
                    continue;
                }
                // Admissible samples lie in [theta_m + alpha, theta_m + 2pi - alpha];
                // pad the index window by 2 on both sides to stay conservative.
                const double alpha = std::acos(kappa);
                const double dth = 2.0 * kPi / a.count;
                const auto lo = static_cast<std::int64_t>(
                              std::floor((theta_m + alpha) / dth - 0.5)) - 2;
                const auto hi = static_cast<std::int64_t>(
                              std::ceil((theta_m + 2.0 * kPi - alpha) / dth - 0.5)) + 2;
                const std::int64_t span = hi - lo + 1;
                if (span >= a.count) {
                    rg = {0, a.count};
                } else {
                    const std::int64_t cnt = a.count;
                    rg.start = static_cast<std::int32_t>(((lo % cnt) + cnt) % cnt);
                    rg.len = static_cast<std::int32_t>(span);
                }
            }
        }
    }

    /// Visits every nonzero bilinear contribution of the contiguous sample
    /// block [start, start+len) at arc k for a detector at (dmx, dmy).
    template <class F>
    void visit_segment(const ArcTable& a, double dmx, double dmy, std::int32_t start,
                       std::int32_t len, F&& f) const {
        const double h = grid_.half_width;
        const double inv_px = 1.0 / grid_.pixel_size();
        const double base_u = (dmx + h) * inv_px - 0.5;
        const double base_v = (dmy + h) * inv_px - 0.5;
        const int n = grid_.n;
        const double* uc = uc_.data() + a.offset;
        const double* vc = vc_.data() + a.offset;
        for (std::int32_t i = start; i < start + len; ++i) {
            const double u = base_u + uc[i];
            const double v = base_v + vc[i];
            if (u <= -1.0 || u >= n || v <= -1.0 || v >= n) continue;
            const int j0 = static_cast<int>(std::floor(u));
            const int i0 = static_cast<int>(std::floor(v));
            const double fu = u - j0;
            const double fv = v - i0;
            if (j0 >= 0 && j0 < n - 1 && i0 >= 0 && i0 < n - 1) {
                const std::size_t base = static_cast<std::size_t>(i0) * n + j0;
                f(base, (1 - fv) * (1 - fu));
                f(base + 1, (1 - fv) * fu);
                f(base + n, fv * (1 - fu));
                f(base + n + 1, fv * fu);
            } else {
                const bool c0 = j0 >= 0 && j0 < n;
                const bool c1 = j0 + 1 >= 0 && j0 + 1 < n;
                const bool r0 = i0 >= 0 && i0 < n;
                const bool r1 = i0 + 1 >= 0 && i0 + 1 < n;
                if (r0 && c0) f(static_cast<std::size_t>(i0) * n + j0, (1 - fv) * (1 - fu));
                if (r0 && c1) f(static_cast<std::size_t>(i0) * n + j0 + 1, (1 - fv) * fu);
                if (r1 && c0) f(static_cast<std::size_t>(i0 + 1) * n + j0, fv * (1 - fu));
                if (r1 && c1) f(static_cast<std::size_t>(i0 + 1) * n + j0 + 1, fv * fu);
            }
        }
    }

    /// Visits every nonzero bilinear contribution of row (m,k); f receives
    /// (pixel index, bilinear weight). Gather and scatter share this exact
    /// enumeration, which is what makes the adjoint a true transpose.
    template <class F>
    void visit_row(int m, int k, F&& f) const {
        const ArcTable& a = arc_[k];
        const Range rg = ranges_[static_cast<std::size_t>(m) * time_.samples + k];
        if (rg.len == 0) return;
        const auto [dmx, dmy] = geom_.position(m);
        const std::int32_t head = std::min(rg.len, a.count - rg.start);
        visit_segment(a, dmx, dmy, rg.start, head, f);
        if (rg.len > head) visit_segment(a, dmx, dmy, 0, rg.len - head, f);
    }

    void check_image(const Image& x) const {
        if (x.grid != grid_)
            throw DimensionMismatchError("PatForwardModel: image grid mismatch");
    }
    void check_sinogram(const Sinogram& u) const {
        if (u.geometry != geom_ || u.time != time_)
            throw DimensionMismatchError("PatForwardModel: sinogram shape mismatch");
    }

    ImageGrid grid_;
    DetectorGeometry geom_;
    TimeGrid time_;
    std::vector<ArcTable> arc_;
    std::vector<Range> ranges_;
    std::vector<double> uc_, vc_;
};

/// One-shot arc-integral operator (builds the quadrature tables each call).
inline Sinogram circular_mean_integral(const Image& x, const DetectorGeometry& geom,
                                       const TimeGrid& time, double oversample = 1.0) {
    return PatForwardModel(x.grid, geom, time, oversample).circular_mean(x);
}

}  // namespace rtk
