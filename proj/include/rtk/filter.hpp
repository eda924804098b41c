#pragma once

#include <cmath>
#include <complex>
#include <memory>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rtk/fft.hpp"
#include "rtk/operator.hpp"
#include "rtk/sinogram.hpp"

namespace rtk {

enum class FilterKind { delta, gauss, bandpass };

/// Magnitude-profile specification; frequencies are fractions of Nyquist.
struct FilterSpec {
    FilterKind kind = FilterKind::delta;
    double f_center = 0;  ///< gauss: center frequency
    double f_sigma = 0;   ///< gauss: standard deviation
    double f_lo = 0;      ///< bandpass: lower edge
    double f_hi = 0;      ///< bandpass: upper edge

    static FilterSpec delta() { return {}; }
    static FilterSpec gauss(double f_center, double f_sigma) {
        FilterSpec s;
        s.kind = FilterKind::gauss;
        s.f_center = f_center;
        s.f_sigma = f_sigma;
        return s;
    }
    static FilterSpec bandpass(double f_lo, double f_hi) {
        FilterSpec s;
        s.kind = FilterKind::bandpass;
        s.f_lo = f_lo;
        s.f_hi = f_hi;
        return s;
    }

    void validate() const {
        switch (kind) {
            case FilterKind::delta:
                return;
            case FilterKind::gauss:
                if (!(f_center >= 0 && f_center <= 1))
                    throw InvalidSpecError("FilterSpec: gauss f_center must be in [0,1]");
                if (!(f_sigma > 0))
                    throw InvalidSpecError("FilterSpec: gauss f_sigma must be > 0");
                return;
            case FilterKind::bandpass:
                if (!(f_lo >= 0 && f_lo < f_hi && f_hi <= 1))
                    throw InvalidSpecError(
                        "FilterSpec: bandpass needs 0 <= f_lo < f_hi <= 1");
                return;
        }
        throw InvalidSpecError("FilterSpec: unknown kind");
    }

    std::string name() const {
        switch (kind) {
            case FilterKind::delta: return "delta";
            case FilterKind::gauss: return "gauss";
            case FilterKind::bandpass: return "bandpass";
        }
        return "?";
    }
};

/// Zero-phase temporal convolution operator for length-T rows: zero-pad to
/// 2T, multiply the real spectrum by a nonnegative magnitude response,
/// transform back, truncate to T. The response is stored on the T+1 rfft
/// bins of the padded length; the padded-domain convolution is a symmetric
/// circulant, so the truncated operator is its own transpose.
class TemporalFilter {
  public:
    TemporalFilter(const FilterSpec& spec, int samples, double dt,
                   std::vector<double> response)
        : spec_(spec), samples_(samples), dt_(dt), response_(std::move(response)),
          fft_(std::make_shared<RealFft>(2 * samples)) {}

    const FilterSpec& spec() const { return spec_; }
    int samples() const { return samples_; }
    double dt() const { return dt_; }
    double nyquist() const { return 1.0 / (2.0 * dt_); }
    /// Magnitude on rfft bin j of the padded length, f_j = j/(2*T*dt), j=0..T.
    const std::vector<double>& response() const { return response_; }

    /// In-place circular convolution on a padded-length (2T) row.
    void filter_padded(double* row) const {
        thread_local std::vector<std::complex<double>> spec;
        spec.resize(static_cast<std::size_t>(fft_->bins()));
        fft_->forward(row, spec.data());
        for (int j = 0; j < fft_->bins(); ++j) spec[j] *= response_[j];
        fft_->inverse(spec.data(), row);
    }

  private:
    FilterSpec spec_;
    int samples_;
    double dt_;
    std::vector<double> response_;
    std::shared_ptr<RealFft> fft_;
};

/// Builds the magnitude response on the padded-length rfft bins.
/// The gauss center is snapped to the nearest bin so its peak is exactly 1.
inline TemporalFilter build_filter(const FilterSpec& spec, int samples, double dt) {
    spec.validate();
    if (samples < 2) throw InvalidParameterError("build_filter: need samples >= 2");
    if (!(dt > 0)) throw InvalidParameterError("build_filter: dt must be > 0");

    const int T = samples;
    std::vector<double> response(static_cast<std::size_t>(T) + 1, 1.0);
    switch (spec.kind) {
        case FilterKind::delta:
            break;
        case FilterKind::gauss: {
            // Work in Nyquist fractions: bin j sits at fraction j/T.
            const double center = std::round(spec.f_center * T) / T;
            for (int j = 0; j <= T; ++j) {
                const double d = static_cast<double>(j) / T - center;
                response[j] = std::exp(-d * d / (2.0 * spec.f_sigma * spec.f_sigma));
            }
            break;
        }
        case FilterKind::bandpass: {
            for (int j = 0; j <= T; ++j) {
                const double f = static_cast<double>(j) / T;
                response[j] = (f >= spec.f_lo && f <= spec.f_hi) ? 1.0 : 0.0;
            }
            break;
        }
    }
    return TemporalFilter(spec, T, dt, std::move(response));
}

inline void check_filter_matches(const TemporalFilter& f, const Sinogram& s) {
    if (f.samples() != s.time.samples || f.dt() != s.time.dt)
        throw DimensionMismatchError("TemporalFilter: sinogram time axis mismatch");
}

/// Row-wise zero-phase filtering (pad, transform, multiply, back, truncate).
inline Sinogram apply_filter(const TemporalFilter& f, const Sinogram& s) {
    check_filter_matches(f, s);
    const int T = s.time.samples;
    const int M = s.geometry.count;
    Sinogram out(s.geometry, s.time);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int m = 0; m < M; ++m) {
        thread_local std::vector<double> padded;
        padded.assign(static_cast<std::size_t>(2) * T, 0.0);
        const double* row = s.values.data() + static_cast<std::size_t>(m) * T;
        std::copy(row, row + T, padded.begin());
        f.filter_padded(padded.data());
        std::copy(padded.begin(), padded.begin() + T,
                  out.values.begin() + static_cast<std::size_t>(m) * T);
    }
    return out;
}

/// Transpose of apply_filter. Pad/truncate transpose into each other and the
/// padded-domain circulant is symmetric, so the transpose is the same map;
/// kept as its own entry point for operator composition.
inline Sinogram apply_filter_adjoint(const TemporalFilter& f, const Sinogram& s) {
    return apply_filter(f, s);
}

/// Sampled magnitude response up to Nyquist, in physical frequency units.
struct FrequencyResponse {
    std::vector<double> freqs;
    std::vector<double> magnitude;
};

inline FrequencyResponse frequency_response(const TemporalFilter& f) {
    const int T = f.samples();
    FrequencyResponse fr;
    fr.freqs.resize(static_cast<std::size_t>(T) + 1);
    fr.magnitude = f.response();
    for (int j = 0; j <= T; ++j)
        fr.freqs[j] = static_cast<double>(j) / (2.0 * T * f.dt());
    return fr;
}

/// Chain applying the filter after the forward operator; the adjoint runs
/// the transposed filter before the forward adjoint.
inline LinearOperatorChain compose_filtered_forward(const TemporalFilter& f,
                                                    const LinearOperatorChain& a) {
    auto filt = std::make_shared<TemporalFilter>(f);
    LinearOperatorChain c;
    c.domain = a.domain;
    c.descriptor = "filter(" + f.spec().name() + ")*" + a.descriptor;
    c.apply = [filt, apply = a.apply](const Image& x) {
        return apply_filter(*filt, apply(x));
    };
    c.adjoint = [filt, adjoint = a.adjoint](const Sinogram& u) {
        return adjoint(apply_filter_adjoint(*filt, u));
    };
    return c;
}

}  // namespace rtk
