#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "rtk/filter.hpp"
#include "rtk/operator.hpp"
#include "rtk/regularization.hpp"

namespace rtk {

struct SolverConfig {
    int iterations = 5000;
    double alpha = 6e-6;
    double theta = 1.0;  ///< over-relaxation in [0,1]
    int norm_power_iters = 100;
    double norm_tol = 1e-6;
    int trace_every = 10;
    std::uint64_t norm_seed = 0x5eed5eed5eed5eedULL;

    void validate() const {
        if (iterations < 1) throw InvalidParameterError("SolverConfig: iterations must be >= 1");
        if (alpha < 0) throw InvalidParameterError("SolverConfig: alpha must be >= 0");
        if (!(theta >= 0 && theta <= 1))
            throw InvalidParameterError("SolverConfig: theta must be in [0,1]");
        if (norm_power_iters < 1)
            throw InvalidParameterError("SolverConfig: norm_power_iters must be >= 1");
        if (!(norm_tol > 0)) throw InvalidParameterError("SolverConfig: norm_tol must be > 0");
        if (trace_every < 1) throw InvalidParameterError("SolverConfig: trace_every must be >= 1");
    }
};

struct SolveTrace {
    std::vector<int> iteration;
    std::vector<double> objective;
    std::vector<double> fidelity;
    std::vector<double> tv;
    std::vector<double> step_norm;
};

struct ObjectiveValue {
    double total = 0;
    double fidelity = 0;
    double tv = 0;
    bool feasible = true;  ///< false when x has a negative entry (total is +inf)
};

/// T(x) = |K1 x - b|^2 + alpha * TV(x), with total flagged +inf whenever x
/// violates the nonnegativity constraint.
inline ObjectiveValue objective(const Image& x, const LinearOperatorChain& k1,
                                const Sinogram& b, double alpha) {
    ObjectiveValue v;
    Sinogram r = k1.apply(x);
    check_same_shape(r, b);
    double fid = 0;
    for (std::size_t i = 0; i < r.values.size(); ++i) {
        const double d = r.values[i] - b.values[i];
        fid += d * d;
    }
    v.fidelity = fid;
    v.tv = tv_value(x);
    for (double e : x.values)
        if (e < 0) v.feasible = false;
    v.total = v.feasible ? v.fidelity + alpha * v.tv
                         : std::numeric_limits<double>::infinity();
    return v;
}

struct SolveResult {
    Image x;
    SolveTrace trace;
    double operator_norm_estimate = 0;  ///< of the stacked operator (K1; grad)
    double sigma = 0;
    double tau = 0;
};

using TraceCallback = std::function<void(int iteration, const Image& x)>;

/// Chambolle-Pock primal-dual iteration on the stacked dual (p for the
/// fidelity, q for TV), with the nonnegativity projection as the primal
/// prox. Step sizes sigma = tau = 1/L where L is the power-iteration norm
/// of the stacked operator inflated by 1%, so sigma*tau*L^2 <= 1.
inline SolveResult solve(const LinearOperatorChain& k1, const Sinogram& b,
                         const SolverConfig& config, const Image* x_init = nullptr,
                         const TraceCallback& on_trace = {}) {
    config.validate();
    if (x_init && x_init->grid != k1.domain)
        throw DimensionMismatchError("solve: x_init grid mismatch");

    const double l_est = power_iteration_norm(
        k1.domain,
        [&](const Image& x) {
            Image nx = k1.adjoint(k1.apply(x));
            const Image lap = divergence(gradient(x));
            for (std::size_t i = 0; i < nx.values.size(); ++i)
                nx.values[i] -= lap.values[i];
            return nx;
        },
        config.norm_power_iters, config.norm_tol, config.norm_seed);
    const double l_safe = l_est > 0 ? 1.01 * l_est : 1.0;
    const double sigma = 1.0 / l_safe;
    const double tau = 1.0 / l_safe;

    Image x = x_init ? *x_init : Image(k1.domain);
    Image xbar = x;
    Sinogram p(b.geometry, b.time);
    GradientField q(k1.domain);

    SolveResult res;
    res.operator_norm_estimate = l_est;
    res.sigma = sigma;
    res.tau = tau;

    for (int k = 0; k < config.iterations; ++k) {
        // dual ascent on the relaxed iterate
        Sinogram kx = k1.apply(xbar);
        check_same_shape(kx, b);
        for (std::size_t i = 0; i < p.values.size(); ++i)
            p.values[i] += sigma * kx.values[i];
        p = prox_fidelity_conjugate(std::move(p), sigma, b);

        GradientField gx = gradient(xbar);
        for (std::size_t i = 0; i < q.dx.size(); ++i) {
            q.dx[i] += sigma * gx.dx[i];
            q.dy[i] += sigma * gx.dy[i];
        }
        q = prox_tv_dual(std::move(q), config.alpha);

        // primal descent and over-relaxation
        const Image kt_p = k1.adjoint(p);
        const Image div_q = divergence(q);
        double step2 = 0;
        for (std::size_t i = 0; i < x.values.size(); ++i) {
            const double xn =
                std::max(0.0, x.values[i] - tau * (kt_p.values[i] - div_q.values[i]));
            const double d = xn - x.values[i];
            step2 += d * d;
            xbar.values[i] = xn + config.theta * d;
            x.values[i] = xn;
        }

        const bool last = k + 1 == config.iterations;
        if ((k + 1) % config.trace_every == 0 || last) {
            const ObjectiveValue ov = objective(x, k1, b, config.alpha);
            const double sn = std::sqrt(step2);
            if (!std::isfinite(ov.total) || !std::isfinite(sn) || !all_finite(x))
                throw DivergenceError("solve: non-finite values at iteration " +
                                      std::to_string(k + 1));
            res.trace.iteration.push_back(k + 1);
            res.trace.objective.push_back(ov.total);
            res.trace.fidelity.push_back(ov.fidelity);
            res.trace.tv.push_back(ov.tv);
            res.trace.step_norm.push_back(sn);
            if (on_trace) on_trace(k + 1, x);
        }
    }

    res.x = std::move(x);
    return res;
}

/// Data-fidelity selector: plain squared l2 distance or the filtered
/// (relaxed) distance with a given magnitude profile.
struct FidelityChoice {
    bool filtered = false;
    FilterSpec filter;

    static FidelityChoice l2() { return {}; }
    static FidelityChoice with_filter(const FilterSpec& f) { return {true, f}; }

    std::string name() const { return filtered ? filter.name() : "l2"; }
};

/// Builds (K1, b) such that |K1 x - b|^2 is the chosen fidelity evaluated at
/// x against data y_B: l2 gives (A, y_B); filtered gives (Phi*A, Phi y_B).
inline std::pair<LinearOperatorChain, Sinogram> make_fidelity_chain(
    const FidelityChoice& choice, const LinearOperatorChain& a, const Sinogram& y_b) {
    if (!choice.filtered) return {a, y_b};
    const TemporalFilter f = build_filter(choice.filter, y_b.time.samples, y_b.time.dt);
    return {compose_filtered_forward(f, a), apply_filter(f, y_b)};
}

}  // namespace rtk
