#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "rtk/errors.hpp"

namespace rtk {

inline constexpr double kPi = 3.14159265358979323846;

/// Ring of point detectors, equispaced in angle on a circle of given radius.
struct DetectorGeometry {
    int count = 0;      ///< number of detectors
    double radius = 0;  ///< ring radius

    DetectorGeometry() = default;
    DetectorGeometry(int count_, double radius_) : count(count_), radius(radius_) {
        if (count < 1) throw InvalidParameterError("DetectorGeometry: count must be >= 1");
        if (!(radius > 0)) throw InvalidParameterError("DetectorGeometry: radius must be > 0");
    }

    double angle(int m) const { return 2.0 * kPi * m / count; }

    std::pair<double, double> position(int m) const {
        const double th = angle(m);
        return {radius * std::cos(th), radius * std::sin(th)};
    }

    friend bool operator==(const DetectorGeometry& a, const DetectorGeometry& b) {
        return a.count == b.count && a.radius == b.radius;
    }
    friend bool operator!=(const DetectorGeometry& a, const DetectorGeometry& b) {
        return !(a == b);
    }
};

/// Uniform time axis t_k = k*dt with a constant sound speed.
struct TimeGrid {
    int samples = 0;
    double dt = 0;
    double c = 1.0;  ///< sound speed

    TimeGrid() = default;
    TimeGrid(int samples_, double dt_, double c_ = 1.0) : samples(samples_), dt(dt_), c(c_) {
        if (samples < 1) throw InvalidParameterError("TimeGrid: samples must be >= 1");
        if (!(dt > 0)) throw InvalidParameterError("TimeGrid: dt must be > 0");
        if (!(c > 0)) throw InvalidParameterError("TimeGrid: sound speed must be > 0");
    }

    double t(int k) const { return k * dt; }

    friend bool operator==(const TimeGrid& a, const TimeGrid& b) {
        return a.samples == b.samples && a.dt == b.dt && a.c == b.c;
    }
    friend bool operator!=(const TimeGrid& a, const TimeGrid& b) { return !(a == b); }
};

/// Time step such that the last sample just covers the farthest corner of the
/// [-h,h]^2 domain as seen from the detector ring.
inline double covering_dt(double detector_radius, double half_width, double c, int samples) {
    if (samples < 2) throw InvalidParameterError("covering_dt: need samples >= 2");
    return (detector_radius + half_width * std::sqrt(2.0)) / (c * (samples - 1));
}

/// Detector-by-time data array, row-major with the detector index major.
struct Sinogram {
    DetectorGeometry geometry;
    TimeGrid time;
    std::vector<double> values;

    Sinogram() = default;
    Sinogram(const DetectorGeometry& g, const TimeGrid& t)
        : geometry(g), time(t),
          values(static_cast<std::size_t>(g.count) * t.samples, 0.0) {}
    Sinogram(const DetectorGeometry& g, const TimeGrid& t, std::vector<double> v)
        : geometry(g), time(t), values(std::move(v)) {
        if (values.size() != static_cast<std::size_t>(g.count) * t.samples)
            throw DimensionMismatchError("Sinogram: value count does not match geometry/time");
    }

    double& at(int m, int k) { return values[static_cast<std::size_t>(m) * time.samples + k]; }
    double at(int m, int k) const {
        return values[static_cast<std::size_t>(m) * time.samples + k];
    }
};

inline void check_same_shape(const Sinogram& a, const Sinogram& b) {
    if (a.geometry != b.geometry || a.time != b.time)
        throw DimensionMismatchError("sinograms have different geometry or time grids");
}

inline double dot(const Sinogram& a, const Sinogram& b) {
    check_same_shape(a, b);
    double s = 0;
    for (std::size_t k = 0; k < a.values.size(); ++k) s += a.values[k] * b.values[k];
    return s;
}

inline double norm(const Sinogram& a) {
    double s = 0;
    for (double v : a.values) s += v * v;
    return std::sqrt(s);
}

inline bool all_finite(const Sinogram& a) {
    for (double v : a.values)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace rtk
