#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rtk/config.hpp"
#include "rtk/filter.hpp"
#include "rtk/forward.hpp"
#include "rtk/io.hpp"
#include "rtk/phantom.hpp"
#include "rtk/solver.hpp"

namespace rtk {

/// Peak signal-to-noise ratio in dB against `reference`, whose maximum value
/// defines the peak. Identical images yield +infinity.
inline double psnr(const Image& x, const Image& reference) {
    check_same_grid(x, reference);
    const ImageStats stats = image_stats(reference);
    if (!(stats.max > 0)) throw InvalidReferenceError("psnr: reference peak must be > 0");
    double mse = 0.0;
    for (std::size_t i = 0; i < x.values.size(); ++i) {
        const double d = x.values[i] - reference.values[i];
        mse += d * d;
    }
    mse /= static_cast<double>(x.values.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(stats.max * stats.max / mse);
}

inline double rel_l2_error(const Image& x, const Image& reference) {
    check_same_grid(x, reference);
    const double denom = norm(reference);
    if (denom == 0.0) throw InvalidReferenceError("rel_l2_error: reference norm is zero");
    double acc = 0.0;
    for (std::size_t i = 0; i < x.values.size(); ++i) {
        const double d = x.values[i] - reference.values[i];
        acc += d * d;
    }
    return std::sqrt(acc) / denom;
}

struct Metrics {
    double psnr = std::numeric_limits<double>::quiet_NaN();
    double rel_l2_error = std::numeric_limits<double>::quiet_NaN();
    double fidelity_residual = std::numeric_limits<double>::quiet_NaN();
};

/// Applies the acquisition model to the ground truth and adds white Gaussian
/// noise whose standard deviation is `factor` times the chosen mean of the
/// clean data. The same seed always yields the same sinogram.
inline Sinogram simulate_data(const Image& truth, const LinearOperatorChain& model,
                              const TemporalFilter& system_psf, const NoiseSpec& noise) {
    Sinogram clean = apply_filter(system_psf, model.apply(truth));
    double mean = 0.0;
    for (double v : clean.values)
        mean += noise.mean_mode == MeanMode::abs ? std::abs(v) : v;
    mean /= static_cast<double>(clean.values.size());
    const double std_dev = noise.factor * mean;
    if (std_dev < 0)
        throw InvalidParameterError(
            "simulate_data: raw data mean is negative, cannot scale noise");
    const std::vector<double> draws =
        gaussian_noise(clean.values.size(), std_dev, noise.seed);
    for (std::size_t i = 0; i < clean.values.size(); ++i) clean.values[i] += draws[i];
    return clean;
}

struct ReconResult {
    std::string fidelity_name;
    Image image;
    SolveTrace trace;
    Metrics metrics;
    double operator_norm_estimate = 0.0;
    double wall_seconds = 0.0;
};

/// Runs the primal-dual solver for one fidelity choice. Metrics against the
/// ground truth are filled only when `truth` is non-null.
inline ReconResult reconstruct(const Sinogram& data, const FidelityChoice& choice,
                               const LinearOperatorChain& model, const SolverConfig& config,
                               const Image* truth = nullptr) {
    const auto t0 = std::chrono::steady_clock::now();
    auto [k1, b] = make_fidelity_chain(choice, model, data);
    SolveResult sol = solve(k1, b, config);
    const auto t1 = std::chrono::steady_clock::now();

    ReconResult out;
    out.fidelity_name = choice.name();
    out.image = std::move(sol.x);
    out.trace = std::move(sol.trace);
    out.operator_norm_estimate = sol.operator_norm_estimate;
    out.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
    out.metrics.fidelity_residual =
        out.trace.fidelity.empty() ? std::numeric_limits<double>::quiet_NaN()
                                   : out.trace.fidelity.back();
    if (truth != nullptr) {
        out.metrics.psnr = psnr(out.image, *truth);
        out.metrics.rel_l2_error = rel_l2_error(out.image, *truth);
    }
    return out;
}

inline FidelityChoice fidelity_choice_from_config(const RunConfig& cfg,
                                                  const std::string& name) {
    if (name == "l2") return FidelityChoice::l2();
    return FidelityChoice::with_filter(cfg.fidelity_filter(name));
}

struct ComparisonReport {
    Image phantom;
    Sinogram data;
    std::vector<ReconResult> runs;
    double adjoint_residual = 0.0;
    double total_wall_seconds = 0.0;
    std::filesystem::path out_dir;
};

namespace detail {

inline void write_trace_csv(const std::filesystem::path& path, const SolveTrace& trace) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f << "iter,objective,fidelity,tv,step_norm\n";
    for (std::size_t i = 0; i < trace.iteration.size(); ++i)
        f << trace.iteration[i] << ',' << format_double(trace.objective[i]) << ','
          << format_double(trace.fidelity[i]) << ',' << format_double(trace.tv[i]) << ','
          << format_double(trace.step_norm[i]) << '\n';
    if (!f) throw IoError("failed writing " + path.string());
}

inline void write_metrics_csv(const std::filesystem::path& path,
                              const std::vector<ReconResult>& runs) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f << "fidelity,psnr,rel_l2_error,fidelity_residual,wall_seconds\n";
    for (const ReconResult& r : runs)
        f << r.fidelity_name << ',' << format_double(r.metrics.psnr) << ','
          << format_double(r.metrics.rel_l2_error) << ','
          << format_double(r.metrics.fidelity_residual) << ','
          << format_double(r.wall_seconds) << '\n';
    if (!f) throw IoError("failed writing " + path.string());
}

}  // namespace detail

/// Runs the full comparison: phantom, simulated data, one reconstruction per
/// configured fidelity, and all on-disk artifacts under cfg.out_dir. On error
/// every file written so far is removed and the failing stage is reported.
inline ComparisonReport run_comparison(const RunConfig& cfg) {
    namespace fs = std::filesystem;
    const auto wall0 = std::chrono::steady_clock::now();

    ComparisonReport report;
    report.out_dir = fs::path(cfg.out_dir);
    std::vector<fs::path> written;
    std::string stage = "setup";
    try {
        std::error_code ec;
        fs::create_directories(report.out_dir, ec);
        if (ec)
            throw IoError("cannot create output directory " + report.out_dir.string() +
                          ": " + ec.message());

        const ImageGrid grid = cfg.make_grid();
        const DetectorGeometry geometry = cfg.make_geometry();
        const TimeGrid time = cfg.make_time_grid();
        auto model = std::make_shared<const PatForwardModel>(grid, geometry, time);
        const LinearOperatorChain chain = PatForwardModel::chain(model);
        report.adjoint_residual = adjoint_test_residual(chain, geometry, time, 0xad701ULL);

        stage = "phantom";
        report.phantom = make_paper_phantom(grid);
        {
            const fs::path p = report.out_dir / "phantom.rtkd";
            write_image_rtkd(p.string(), report.phantom);
            written.push_back(p);
        }

        stage = "simulate";
        const TemporalFilter system_psf =
            build_filter(cfg.system_filter, time.samples, time.dt);
        report.data = simulate_data(report.phantom, chain, system_psf, cfg.noise);
        {
            const fs::path p = report.out_dir / "sinogram.rtkd";
            write_sinogram_rtkd(p.string(), report.data);
            written.push_back(p);
        }

        for (const std::string& name : cfg.fidelities) {
            stage = "reconstruct[" + name + "]";
            const FidelityChoice choice = fidelity_choice_from_config(cfg, name);
            ReconResult run =
                reconstruct(report.data, choice, chain, cfg.solver, &report.phantom);

            const fs::path recon_path = report.out_dir / ("recon_" + name + ".rtkd");
            write_image_rtkd(recon_path.string(), run.image);
            written.push_back(recon_path);
            const fs::path pgm_path = report.out_dir / ("recon_" + name + ".pgm");
            export_pgm(pgm_path.string(), run.image);
            written.push_back(pgm_path);
            const fs::path trace_path = report.out_dir / ("trace_" + name + ".csv");
            detail::write_trace_csv(trace_path, run.trace);
            written.push_back(trace_path);

            report.runs.push_back(std::move(run));
        }

        stage = "metrics";
        {
            const fs::path p = report.out_dir / "metrics.csv";
            detail::write_metrics_csv(p, report.runs);
            written.push_back(p);
        }

        stage = "meta";
        {
            nlohmann::json meta;
            meta["format_version"] = "1";
            meta["config"] = run_config_to_json(cfg);
            meta["adjoint_test"] = {{"relative_residual", report.adjoint_residual}};
            nlohmann::json norms = nlohmann::json::object();
            nlohmann::json walls = nlohmann::json::object();
            for (const ReconResult& r : report.runs) {
                norms[r.fidelity_name] = r.operator_norm_estimate;
                walls[r.fidelity_name] = r.wall_seconds;
            }
            meta["operator_norm_estimates"] = norms;
            meta["wall_seconds"] = walls;
            report.total_wall_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0)
                    .count();
            meta["total_wall_seconds"] = report.total_wall_seconds;

            const fs::path p = report.out_dir / "meta.json";
            std::ofstream f(p, std::ios::binary);
            if (!f) throw IoError("cannot open " + p.string() + " for writing");
            f << meta.dump(2) << '\n';
            if (!f) throw IoError("failed writing " + p.string());
            written.push_back(p);
        }
    } catch (const std::exception& e) {
        std::error_code ec;
        for (const fs::path& p : written) fs::remove(p, ec);
        throw Error("run_comparison failed in stage '" + stage + "': " + e.what());
    }

    report.total_wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
    return report;
}

}  // namespace rtk
