#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rtk/experiment.hpp"

namespace rtk {

namespace cli_detail {

inline RunConfig load_config(const std::string& path, bool seed_given,
                             std::uint64_t seed) {
    RunConfig cfg = path.empty() ? RunConfig{} : load_run_config(path);
    if (seed_given) cfg.noise.seed = seed;
    return cfg;
}

inline Image image_from_array(RtkdArray a, const char* what) {
    if (a.dims.size() != 2 || a.dims[0] != a.dims[1])
        throw DimensionMismatchError(std::string(what) + ": expected a square 2-d array");
    if (a.dims[0] < 2 || a.dims[0] > 65536)
        throw DimensionMismatchError(std::string(what) + ": unreasonable image side");
    return Image(ImageGrid(static_cast<int>(a.dims[0]), 1.0), std::move(a.data));
}

inline int do_simulate(const RunConfig& cfg, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());

    const ImageGrid grid = cfg.make_grid();
    const TimeGrid time = cfg.make_time_grid();
    auto model = std::make_shared<const PatForwardModel>(grid, cfg.make_geometry(), time);
    const Image truth = make_paper_phantom(grid);
    const TemporalFilter psf = build_filter(cfg.system_filter, time.samples, time.dt);
    const Sinogram data = simulate_data(truth, PatForwardModel::chain(model), psf, cfg.noise);

    const fs::path dir(out_dir);
    write_image_rtkd((dir / "phantom.rtkd").string(), truth);
    write_sinogram_rtkd((dir / "sinogram.rtkd").string(), data);
    std::cout << "wrote " << (dir / "phantom.rtkd").string() << "\n"
              << "wrote " << (dir / "sinogram.rtkd").string() << "\n";
    return 0;
}

inline int do_reconstruct(const RunConfig& cfg, const std::string& data_path,
                          const std::string& fidelity, const std::string& out_path) {
    RtkdArray a = read_array(data_path);
    if (a.dims.size() != 2 ||
        a.dims[0] != static_cast<std::uint64_t>(cfg.detector_count) ||
        a.dims[1] != static_cast<std::uint64_t>(cfg.time_samples))
        throw DimensionMismatchError("reconstruct: data shape does not match the config");
    const Sinogram data(cfg.make_geometry(), cfg.make_time_grid(), std::move(a.data));

    auto model =
        std::make_shared<const PatForwardModel>(cfg.make_grid(), data.geometry, data.time);
    const ReconResult r =
        reconstruct(data, fidelity_choice_from_config(cfg, fidelity),
                    PatForwardModel::chain(model), cfg.solver);
    write_image_rtkd(out_path, r.image);
    std::cout << "wrote " << out_path << "\n"
              << "fidelity_residual=" << format_double(r.metrics.fidelity_residual)
              << " wall_seconds=" << format_double(r.wall_seconds) << "\n";
    return 0;
}

inline int do_evaluate(const std::string& recon_path, const std::string& ref_path,
                       const std::string& out_csv) {
    const Image recon = image_from_array(read_array(recon_path), "evaluate");
    const Image ref = image_from_array(read_array(ref_path), "evaluate");
    const double p = psnr(recon, ref);
    const double r = rel_l2_error(recon, ref);
    std::cout << "psnr=" << format_double(p) << " rel_l2_error=" << format_double(r)
              << "\n";
    if (!out_csv.empty()) {
        std::ofstream f(out_csv, std::ios::binary);
        if (!f) throw IoError("cannot open " + out_csv + " for writing");
        f << "psnr,rel_l2_error\n" << format_double(p) << ',' << format_double(r) << '\n';
        if (!f) throw IoError("failed writing " + out_csv);
    }
    return 0;
}

inline int do_filter_response(const RunConfig& cfg, const std::string& which,
                              const std::string& out_csv) {
    const FilterSpec& spec = which == "system" ? cfg.system_filter
                             : which == "gauss" ? cfg.gauss_filter
                                                : cfg.bandpass_filter;
    const TimeGrid time = cfg.make_time_grid();
    const FrequencyResponse fr =
        frequency_response(build_filter(spec, time.samples, time.dt));
    std::ofstream f(out_csv, std::ios::binary);
    if (!f) throw IoError("cannot open " + out_csv + " for writing");
    f << "freq,magnitude\n";
    for (std::size_t j = 0; j < fr.freqs.size(); ++j)
        f << format_double(fr.freqs[j]) << ',' << format_double(fr.magnitude[j]) << '\n';
    if (!f) throw IoError("failed writing " + out_csv);
    std::cout << "wrote " << out_csv << " (" << fr.freqs.size() << " bins)\n";
    return 0;
}

inline int do_run_experiment(const RunConfig& cfg) {
    const ComparisonReport report = run_comparison(cfg);
    std::cout << "outputs in " << report.out_dir.string() << "\n";
    std::cout << "fidelity      psnr    rel_l2_error    wall_seconds\n";
    for (const ReconResult& r : report.runs) {
        char line[160];
        std::snprintf(line, sizeof(line), "%-10s %7.3f %15.6f %15.3f\n",
                      r.fidelity_name.c_str(), r.metrics.psnr, r.metrics.rel_l2_error,
                      r.wall_seconds);
        std::cout << line;
    }
    std::cout << "total_wall_seconds=" << format_double(report.total_wall_seconds) << "\n";
    return 0;
}

inline int do_selftest() {
    int failures = 0;
    auto check = [&failures](const char* name, bool ok, double value) {
        std::cout << (ok ? "[ok]   " : "[FAIL] ") << name << " = " << format_double(value)
                  << "\n";
        if (!ok) ++failures;
    };

    // Forward-model adjoint identity on a small but nontrivial geometry.
    {
        const ImageGrid grid(32, 1.0);
        const DetectorGeometry geom(16, 1.2);
        const TimeGrid time(64, covering_dt(1.2, 1.0, 1.0, 64), 1.0);
        auto model = std::make_shared<const PatForwardModel>(grid, geom, time);
        const LinearOperatorChain a = PatForwardModel::chain(model);
        double worst = 0;
        for (std::uint64_t s = 1; s <= 3; ++s)
            worst = std::max(worst, adjoint_test_residual(a, geom, time, s));
        check("adjoint residual (forward model)", worst < 1e-10, worst);

        const TemporalFilter bp = build_filter(FilterSpec::bandpass(0.08, 0.35),
                                               time.samples, time.dt);
        const LinearOperatorChain fa = compose_filtered_forward(bp, a);
        const double rf = adjoint_test_residual(fa, geom, time, 7);
        check("adjoint residual (filtered model)", rf < 1e-10, rf);
    }

    // Gradient/divergence duality <grad x, g> == -<x, div g>.
    {
        const ImageGrid grid(17, 1.0);
        const Image x = random_image(grid, 11);
        GradientField g(grid);
        GaussianStream gs(12);
        for (double& v : g.dx) v = gs.next();
        for (double& v : g.dy) v = gs.next();
        const double lhs = dot(gradient(x), g);
        const double rhs = -dot(x, divergence(g));
        const double res = std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));
        check("gradient/divergence duality", res < 1e-12, res);
    }

    // Dual prox projects onto the alpha-ball: (3,4) with alpha=1 -> (0.6,0.8).
    {
        GradientField g(ImageGrid(2, 1.0));
        g.dx[0] = 3.0;
        g.dy[0] = 4.0;
        g = prox_tv_dual(std::move(g), 1.0);
        const double err = std::abs(g.dx[0] - 0.6) + std::abs(g.dy[0] - 0.8);
        check("tv dual prox", err < 1e-14, err);
    }

    // Identity data term: the solution of |x-b|^2 with x >= 0 is max(b, 0).
    {
        const ImageGrid grid(8, 1.0);
        const LinearOperatorChain id = identity_chain(grid);
        const Image b_img = random_image(grid, 21);
        const Sinogram b = id.apply(b_img);
        SolverConfig cfg;
        cfg.iterations = 400;
        cfg.alpha = 0.0;
        const SolveResult sol = solve(id, b, cfg);
        double err = 0;
        for (std::size_t i = 0; i < sol.x.values.size(); ++i)
            err = std::max(err, std::abs(sol.x.values[i] - std::max(0.0, b.values[i])));
        check("identity solve vs closed form", err < 1e-6, err);
    }

    if (failures == 0) {
        std::cout << "selftest passed\n";
        return 0;
    }
    std::cerr << "selftest failed (" << failures << " check(s))\n";
    return 3;
}

}  // namespace cli_detail

/// Entry point behind main(): exit code 0 on success, 1 for usage errors,
/// 2 for configuration errors, 3 for runtime failures.
inline int cli_main(int argc, char** argv) {
    CLI::App app{"Photoacoustic reconstruction toolkit"};
    app.require_subcommand(1);
    std::uint64_t seed = 0;
    app.add_option("--seed", seed, "Override the noise seed from the config");

    std::string config_path, out_dir, out_path, data_path, recon_path, ref_path;
    std::string fidelity, which;

    CLI::App* sim = app.add_subcommand("simulate", "Phantom + noisy sinogram to a directory");
    sim->add_option("--config", config_path, "JSON config (defaults when omitted)");
    sim->add_option("--out", out_dir, "Output directory")->required();

    CLI::App* rec = app.add_subcommand("reconstruct", "Reconstruct one fidelity from data");
    rec->add_option("--config", config_path, "JSON config (defaults when omitted)");
    rec->add_option("--data", data_path, "Input sinogram (.rtkd)")->required();
    rec->add_option("--fidelity", fidelity, "One of l2|gauss|bandpass")
        ->required()
        ->check(CLI::IsMember({"l2", "gauss", "bandpass"}));
    rec->add_option("--out", out_path, "Output image (.rtkd)")->required();

    CLI::App* eva = app.add_subcommand("evaluate", "PSNR / relative error of a reconstruction");
    eva->add_option("--recon", recon_path, "Reconstruction (.rtkd)")->required();
    eva->add_option("--ref", ref_path, "Reference image (.rtkd)")->required();
    eva->add_option("--out", out_path, "Optional CSV output");

    CLI::App* fil = app.add_subcommand("filter-response", "Dump a filter magnitude response");
    fil->add_option("--config", config_path, "JSON config (defaults when omitted)");
    fil->add_option("--which", which, "One of system|gauss|bandpass")
        ->required()
        ->check(CLI::IsMember({"system", "gauss", "bandpass"}));
    fil->add_option("--out", out_path, "CSV output")->required();

    CLI::App* run = app.add_subcommand("run-experiment", "Full three-fidelity comparison");
    run->add_option("--config", config_path, "JSON config (defaults when omitted)");
    run->add_option("--out", out_dir, "Output directory (overrides the config)");

    CLI::App* self = app.add_subcommand("selftest", "Internal consistency checks");

    for (CLI::App* s : {sim, rec, eva, fil, run, self}) s->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << std::flush;
        return 1;
    }
    const bool seed_given = app.count("--seed") > 0;

    try {
        using namespace cli_detail;
        if (app.got_subcommand(sim))
            return do_simulate(load_config(config_path, seed_given, seed), out_dir);
        if (app.got_subcommand(rec))
            return do_reconstruct(load_config(config_path, seed_given, seed), data_path,
                                  fidelity, out_path);
        if (app.got_subcommand(eva)) return do_evaluate(recon_path, ref_path, out_path);
        if (app.got_subcommand(fil))
            return do_filter_response(load_config(config_path, seed_given, seed), which,
                                      out_path);
        if (app.got_subcommand(run)) {
            RunConfig cfg = load_config(config_path, seed_given, seed);
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            return do_run_experiment(cfg);
        }
        if (app.got_subcommand(self)) return do_selftest();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    std::cerr << app.help() << std::flush;
    return 1;
}

}  // namespace rtk
