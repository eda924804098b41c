#pragma once

#include <complex>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "rtk/errors.hpp"

namespace rtk {

namespace detail {
// FFTW's planner is not thread-safe; all plan creation/destruction is
// serialized through this mutex. Plan execution on distinct arrays is safe.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace detail

/// Real <-> half-complex FFT of a fixed length, backed by FFTW.
/// Plans are created once and immutable afterwards; execute() calls may run
/// concurrently on distinct buffers.
class RealFft {
  public:
    explicit RealFft(int length) : n_(length) {
        if (length < 2) throw InvalidParameterError("RealFft: length must be >= 2");
        std::vector<double> re(static_cast<std::size_t>(n_));
        std::vector<std::complex<double>> cx(static_cast<std::size_t>(n_) / 2 + 1);
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fwd_ = fftw_plan_dft_r2c_1d(n_, re.data(),
                                    reinterpret_cast<fftw_complex*>(cx.data()), flags);
        inv_ = fftw_plan_dft_c2r_1d(n_, reinterpret_cast<fftw_complex*>(cx.data()),
                                    re.data(), flags);
        if (!fwd_ || !inv_) throw Error("RealFft: plan creation failed");
    }

    ~RealFft() {
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        if (fwd_) fftw_destroy_plan(fwd_);
        if (inv_) fftw_destroy_plan(inv_);
    }

    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    int length() const { return n_; }
    int bins() const { return n_ / 2 + 1; }

    /// out[0..n/2] = DFT of in[0..n-1]. in is left untouched.
    void forward(const double* in, std::complex<double>* out) const {
        fftw_execute_dft_r2c(fwd_, const_cast<double*>(in),
                             reinterpret_cast<fftw_complex*>(out));
    }

    /// out[0..n-1] = inverse DFT of the half-complex spectrum, scaled by 1/n.
    /// in is left untouched (copied internally; FFTW's c2r clobbers its input).
    void inverse(const std::complex<double>* in, double* out) const {
        thread_local std::vector<std::complex<double>> scratch;
        scratch.assign(in, in + bins());
        fftw_execute_dft_c2r(inv_, reinterpret_cast<fftw_complex*>(scratch.data()), out);
        const double scale = 1.0 / n_;
        for (int i = 0; i < n_; ++i) out[i] *= scale;
    }

  private:
    int n_;
    fftw_plan fwd_ = nullptr;
    fftw_plan inv_ = nullptr;
};

}  // namespace rtk
