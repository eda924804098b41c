#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "rtk/errors.hpp"

namespace rtk {

/// PCG32 (XSH-RR variant): 64-bit LCG state, 32-bit xorshift-rotate output.
/// Fixed algorithm constants keep every stream reproducible across platforms.
class Pcg32 {
  public:
    static constexpr std::uint64_t kMultiplier = 6364136223846793005ULL;
    static constexpr std::uint64_t kDefaultStream = 0xda3e39cb94b95bdbULL;

    explicit Pcg32(std::uint64_t seed, std::uint64_t stream = kDefaultStream)
        : state_(0), inc_((stream << 1) | 1u) {
        next_u32();
        state_ += seed;
        next_u32();
    }

    std::uint32_t next_u32() {
        const std::uint64_t old = state_;
        state_ = old * kMultiplier + inc_;
        const auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        const auto rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((-rot) & 31u));
    }

    /// Uniform double in (0,1]; never returns 0, so it is log-safe.
    double next_unit_open() {
        return (static_cast<double>(next_u32()) + 1.0) * 0x1.0p-32;
    }

    /// Uniform double in [0,1).
    double next_unit() { return static_cast<double>(next_u32()) * 0x1.0p-32; }

  private:
    std::uint64_t state_;
    std::uint64_t inc_;
};

/// Standard normal samples via Box-Muller on consecutive PCG32 draws.
/// Pairs (z0, z1) are emitted in index order; an odd count drops the last z1.
class GaussianStream {
  public:
    explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = rng_.next_unit_open();
        const double u2 = rng_.next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    Pcg32 rng_;
    double spare_ = 0;
    bool have_spare_ = false;
};

/// count i.i.d. normal(0, std^2) samples from the seeded generator.
inline std::vector<double> gaussian_noise(std::size_t count, double std_dev,
                                          std::uint64_t seed) {
    if (std_dev < 0) throw InvalidParameterError("gaussian_noise: std must be >= 0");
    std::vector<double> out(count, 0.0);
    if (std_dev == 0) return out;
    GaussianStream g(seed);
    for (std::size_t i = 0; i < count; ++i) out[i] = std_dev * g.next();
    return out;
}

}  // namespace rtk
