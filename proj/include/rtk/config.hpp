#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rtk/filter.hpp"
#include "rtk/image.hpp"
#include "rtk/sinogram.hpp"
#include "rtk/solver.hpp"

namespace rtk {

enum class MeanMode { abs, raw };

/// Additive white Gaussian noise scaled to the clean data:
/// std = factor * mean(|data|) ("abs" mode) or factor * mean(data) ("raw").
struct NoiseSpec {
    double factor = 2.0;
    MeanMode mean_mode = MeanMode::abs;
    std::uint64_t seed = 12345;
};

/// Full experiment configuration with the documented defaults.
struct RunConfig {
    int grid_n = 128;
    double half_width = 1.0;
    int detector_count = 64;
    double detector_radius = 1.2;
    int time_samples = 357;
    double speed_c = 1.0;
    FilterSpec system_filter = FilterSpec::gauss(0.20, 0.08);
    FilterSpec gauss_filter = FilterSpec::gauss(0.20, 0.05);
    FilterSpec bandpass_filter = FilterSpec::bandpass(0.08, 0.35);
    NoiseSpec noise;
    SolverConfig solver;
    std::vector<std::string> fidelities = {"l2", "gauss", "bandpass"};
    std::string out_dir = "out";

    ImageGrid make_grid() const { return {grid_n, half_width}; }
    DetectorGeometry make_geometry() const { return {detector_count, detector_radius}; }
    TimeGrid make_time_grid() const {
        return {time_samples,
                covering_dt(detector_radius, half_width, speed_c, time_samples), speed_c};
    }
    const FilterSpec& fidelity_filter(const std::string& name) const {
        if (name == "gauss") return gauss_filter;
        if (name == "bandpass") return bandpass_filter;
        throw ConfigError("no filter associated with fidelity '" + name + "'");
    }
};

namespace detail {

using nlohmann::json;

inline void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                                const std::string& path) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw ConfigError("unknown config key '" + path + it.key() + "'");
}

inline double get_number(const json& j, const std::string& key, const std::string& path,
                         double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number())
        throw ConfigError("config key '" + path + key + "' must be a number");
    return j.at(key).get<double>();
}

inline int get_int(const json& j, const std::string& key, const std::string& path,
                   int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_integer())
        throw ConfigError("config key '" + path + key + "' must be an integer");
    return j.at(key).get<int>();
}

inline std::uint64_t get_u64(const json& j, const std::string& key,
                             const std::string& path, std::uint64_t fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_unsigned() && !j.at(key).is_number_integer())
        throw ConfigError("config key '" + path + key + "' must be an integer");
    if (j.at(key).is_number_integer() && j.at(key).get<long long>() < 0)
        throw ConfigError("config key '" + path + key + "' must be >= 0");
    return j.at(key).get<std::uint64_t>();
}

inline std::string get_string(const json& j, const std::string& key,
                              const std::string& path, const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_string())
        throw ConfigError("config key '" + path + key + "' must be a string");
    return j.at(key).get<std::string>();
}

inline FilterSpec parse_filter(const json& j, const std::string& path, FilterSpec base) {
    if (!j.is_object()) throw ConfigError("config key '" + path + "' must be an object");
    reject_unknown_keys(j, {"kind", "f_center", "f_sigma", "f_lo", "f_hi"}, path + ".");
    const std::string kind = get_string(j, "kind", path + ".", base.name());
    FilterSpec spec;
    if (kind == "delta") {
        spec = FilterSpec::delta();
        for (const char* k : {"f_center", "f_sigma", "f_lo", "f_hi"})
            if (j.contains(k))
                throw ConfigError("config key '" + path + "." + k +
                                  "' not valid for a delta filter");
    } else if (kind == "gauss") {
        const bool same_kind = base.kind == FilterKind::gauss;
        spec = FilterSpec::gauss(
            get_number(j, "f_center", path + ".", same_kind ? base.f_center : 0.2),
            get_number(j, "f_sigma", path + ".", same_kind ? base.f_sigma : 0.05));
        for (const char* k : {"f_lo", "f_hi"})
            if (j.contains(k))
                throw ConfigError("config key '" + path + "." + k +
                                  "' not valid for a gauss filter");
    } else if (kind == "bandpass") {
        const bool same_kind = base.kind == FilterKind::bandpass;
        spec = FilterSpec::bandpass(
            get_number(j, "f_lo", path + ".", same_kind ? base.f_lo : 0.08),
            get_number(j, "f_hi", path + ".", same_kind ? base.f_hi : 0.35));
        for (const char* k : {"f_center", "f_sigma"})
            if (j.contains(k))
                throw ConfigError("config key '" + path + "." + k +
                                  "' not valid for a bandpass filter");
    } else {
        throw ConfigError("config key '" + path + ".kind' must be delta, gauss or bandpass");
    }
    try {
        spec.validate();
    } catch (const InvalidSpecError& e) {
        throw ConfigError("config key '" + path + "': " + e.what());
    }
    return spec;
}

}  // namespace detail

/// Parses a config document, rejecting unknown keys and filling missing ones
/// from the defaults. Every failure names the offending key.
inline RunConfig parse_run_config(const nlohmann::json& j) {
    using detail::get_int;
    using detail::get_number;
    using detail::get_string;
    using detail::get_u64;
    using detail::reject_unknown_keys;

    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    reject_unknown_keys(j,
                        {"grid", "detectors", "time", "speed_c", "filters", "noise",
                         "solver", "fidelities", "out_dir"},
                        "");
    RunConfig cfg;

    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        if (!g.is_object()) throw ConfigError("config key 'grid' must be an object");
        reject_unknown_keys(g, {"n", "half_width"}, "grid.");
        cfg.grid_n = get_int(g, "n", "grid.", cfg.grid_n);
        cfg.half_width = get_number(g, "half_width", "grid.", cfg.half_width);
    }
    if (cfg.grid_n < 2) throw ConfigError("config key 'grid.n' must be >= 2");
    if (!(cfg.half_width > 0)) throw ConfigError("config key 'grid.half_width' must be > 0");

    if (j.contains("detectors")) {
        const auto& d = j.at("detectors");
        if (!d.is_object()) throw ConfigError("config key 'detectors' must be an object");
        reject_unknown_keys(d, {"count", "radius"}, "detectors.");
        cfg.detector_count = get_int(d, "count", "detectors.", cfg.detector_count);
        cfg.detector_radius = get_number(d, "radius", "detectors.", cfg.detector_radius);
    }
    if (cfg.detector_count < 1) throw ConfigError("config key 'detectors.count' must be >= 1");
    if (!(cfg.detector_radius > cfg.half_width))
        throw ConfigError("config key 'detectors.radius' must exceed grid.half_width");

    if (j.contains("time")) {
        const auto& t = j.at("time");
        if (!t.is_object()) throw ConfigError("config key 'time' must be an object");
        reject_unknown_keys(t, {"samples"}, "time.");
        cfg.time_samples = get_int(t, "samples", "time.", cfg.time_samples);
    }
    if (cfg.time_samples < 3) throw ConfigError("config key 'time.samples' must be >= 3");

    cfg.speed_c = get_number(j, "speed_c", "", cfg.speed_c);
    if (!(cfg.speed_c > 0)) throw ConfigError("config key 'speed_c' must be > 0");

    if (j.contains("filters")) {
        const auto& f = j.at("filters");
        if (!f.is_object()) throw ConfigError("config key 'filters' must be an object");
        reject_unknown_keys(f, {"system", "gauss", "bandpass"}, "filters.");
        if (f.contains("system"))
            cfg.system_filter =
                detail::parse_filter(f.at("system"), "filters.system", cfg.system_filter);
        if (f.contains("gauss"))
            cfg.gauss_filter =
                detail::parse_filter(f.at("gauss"), "filters.gauss", cfg.gauss_filter);
        if (f.contains("bandpass"))
            cfg.bandpass_filter = detail::parse_filter(f.at("bandpass"), "filters.bandpass",
                                                       cfg.bandpass_filter);
    }

    if (j.contains("noise")) {
        const auto& n = j.at("noise");
        if (!n.is_object()) throw ConfigError("config key 'noise' must be an object");
        reject_unknown_keys(n, {"factor", "mean_mode", "seed"}, "noise.");
        cfg.noise.factor = get_number(n, "factor", "noise.", cfg.noise.factor);
        const std::string mode = get_string(n, "mean_mode", "noise.",
                                            cfg.noise.mean_mode == MeanMode::abs ? "abs"
                                                                                 : "raw");
        if (mode == "abs")
            cfg.noise.mean_mode = MeanMode::abs;
        else if (mode == "raw")
            cfg.noise.mean_mode = MeanMode::raw;
        else
            throw ConfigError("config key 'noise.mean_mode' must be \"abs\" or \"raw\"");
        cfg.noise.seed = get_u64(n, "seed", "noise.", cfg.noise.seed);
    }
    if (cfg.noise.factor < 0) throw ConfigError("config key 'noise.factor' must be >= 0");

    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        if (!s.is_object()) throw ConfigError("config key 'solver' must be an object");
        reject_unknown_keys(
            s, {"iterations", "alpha", "theta", "norm_power_iters", "norm_tol", "trace_every"},
            "solver.");
        cfg.solver.iterations = get_int(s, "iterations", "solver.", cfg.solver.iterations);
        cfg.solver.alpha = get_number(s, "alpha", "solver.", cfg.solver.alpha);
        cfg.solver.theta = get_number(s, "theta", "solver.", cfg.solver.theta);
        cfg.solver.norm_power_iters =
            get_int(s, "norm_power_iters", "solver.", cfg.solver.norm_power_iters);
        cfg.solver.norm_tol = get_number(s, "norm_tol", "solver.", cfg.solver.norm_tol);
        cfg.solver.trace_every = get_int(s, "trace_every", "solver.", cfg.solver.trace_every);
        try {
            cfg.solver.validate();
        } catch (const InvalidParameterError& e) {
            throw ConfigError(std::string("config key 'solver': ") + e.what());
        }
    }

    if (j.contains("fidelities")) {
        const auto& f = j.at("fidelities");
        if (!f.is_array()) throw ConfigError("config key 'fidelities' must be an array");
        cfg.fidelities.clear();
        for (const auto& e : f) {
            if (!e.is_string())
                throw ConfigError("config key 'fidelities' entries must be strings");
            const std::string name = e.get<std::string>();
            if (name != "l2" && name != "gauss" && name != "bandpass")
                throw ConfigError("config key 'fidelities': unknown fidelity '" + name + "'");
            for (const auto& seen : cfg.fidelities)
                if (seen == name)
                    throw ConfigError("config key 'fidelities': duplicate '" + name + "'");
            cfg.fidelities.push_back(name);
        }
    }
    if (cfg.fidelities.empty())
        throw ConfigError("config key 'fidelities' must name at least one fidelity");

    cfg.out_dir = get_string(j, "out_dir", "", cfg.out_dir);
    if (cfg.out_dir.empty()) throw ConfigError("config key 'out_dir' must not be empty");

    return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
    }
    return parse_run_config(j);
}

inline nlohmann::json filter_to_json(const FilterSpec& s) {
    nlohmann::json j;
    j["kind"] = s.name();
    if (s.kind == FilterKind::gauss) {
        j["f_center"] = s.f_center;
        j["f_sigma"] = s.f_sigma;
    } else if (s.kind == FilterKind::bandpass) {
        j["f_lo"] = s.f_lo;
        j["f_hi"] = s.f_hi;
    }
    return j;
}

/// Config echo with every effective value spelled out.
inline nlohmann::json run_config_to_json(const RunConfig& cfg) {
    nlohmann::json j;
    j["grid"] = {{"n", cfg.grid_n}, {"half_width", cfg.half_width}};
    j["detectors"] = {{"count", cfg.detector_count}, {"radius", cfg.detector_radius}};
    j["time"] = {{"samples", cfg.time_samples}};
    j["speed_c"] = cfg.speed_c;
    j["filters"] = {{"system", filter_to_json(cfg.system_filter)},
                    {"gauss", filter_to_json(cfg.gauss_filter)},
                    {"bandpass", filter_to_json(cfg.bandpass_filter)}};
    j["noise"] = {{"factor", cfg.noise.factor},
                  {"mean_mode", cfg.noise.mean_mode == MeanMode::abs ? "abs" : "raw"},
                  {"seed", cfg.noise.seed}};
    j["solver"] = {{"iterations", cfg.solver.iterations},
                   {"alpha", cfg.solver.alpha},
                   {"theta", cfg.solver.theta},
                   {"norm_power_iters", cfg.solver.norm_power_iters},
                   {"norm_tol", cfg.solver.norm_tol},
                   {"trace_every", cfg.solver.trace_every}};
    j["fidelities"] = cfg.fidelities;
    j["out_dir"] = cfg.out_dir;
    return j;
}

}  // namespace rtk
