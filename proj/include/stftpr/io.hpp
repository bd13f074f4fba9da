#pragma once
// On-disk formats: measurement grids (header `N W L K M` then M rows of K
// values), signals as two-column (real, imag) text, and the flat key=value
// experiment config with list-valued keys. Unknown config keys are errors.

#include <istream>
#include <ostream>
#include <sstream>

#include "stftpr/harness.hpp"

namespace stftpr {

inline void write_measurements(const MeasurementSet& ms, std::ostream& out) {
    const StftGeometry& g = ms.geom;
    out << g.N << ' ' << g.window.support_length << ' ' << g.L << ' ' << g.K << ' ' << g.M << '\n';
    char buf[64];
    for (std::size_t m = 0; m < g.M; ++m) {
        for (std::size_t k = 0; k < g.K; ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", ms.at(m, k));
            out << buf << (k + 1 < g.K ? " " : "\n");
        }
    }
}

struct RawMeasurements {
    std::size_t N = 0, W = 0, L = 0, K = 0, M = 0;
    std::vector<double> values;  // M x K row-major
};

inline RawMeasurements read_measurements(std::istream& in) {
    RawMeasurements raw;
    if (!(in >> raw.N >> raw.W >> raw.L >> raw.K >> raw.M))
        throw validation_error("measurement file: malformed header, expected 'N W L K M'");
    if (raw.N == 0 || raw.K == 0 || raw.L == 0 || raw.M == 0 || raw.W == 0 || raw.W > raw.N)
        throw validation_error("measurement file: invalid geometry in header");
    raw.values.resize(raw.M * raw.K);
    for (double& v : raw.values)
        if (!(in >> v))
            throw validation_error("measurement file: expected " +
                                   std::to_string(raw.values.size()) + " values after header");
    return raw;
}

/// Attach a window to raw file data, rebuilding the full geometry.
inline MeasurementSet to_measurement_set(const RawMeasurements& raw, const Window& window) {
    if (window.size() != raw.N || window.support_length != raw.W)
        throw validation_error("measurement file: window (N=" + std::to_string(window.size()) +
                               ", W=" + std::to_string(window.support_length) +
                               ") does not match header (N=" + std::to_string(raw.N) +
                               ", W=" + std::to_string(raw.W) + ")");
    StftGeometry geom = make_geometry(window, raw.L, raw.K);
    if (geom.M != raw.M)
        throw validation_error("measurement file: header M=" + std::to_string(raw.M) +
                               " but ceil(N/L)=" + std::to_string(geom.M));
    return MeasurementSet{geom, raw.values, std::nullopt};
}

inline void write_signal(const Signal& x, std::ostream& out) {
    char buf[96];
    for (const cplx& v : x) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v.real(), v.imag());
        out << buf;
    }
}

inline Signal read_signal(std::istream& in) {
    Signal x;
    double re, im;
    while (in >> re >> im) x.push_back({re, im});
    if (x.empty()) throw validation_error("signal file: no (real, imag) rows found");
    return x;
}

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline std::size_t parse_count(const std::string& key, const std::string& v) {
    try {
        long long x = std::stoll(v);
        if (x < 0) throw std::out_of_range("negative");
        return static_cast<std::size_t>(x);
    } catch (const std::exception&) {
        throw validation_error("config: key '" + key + "' expects a nonnegative integer, got '" +
                               v + "'");
    }
}

inline double parse_real(const std::string& key, const std::string& v) {
    if (v == "inf") return std::numeric_limits<double>::infinity();
    try {
        return std::stod(v);
    } catch (const std::exception&) {
        throw validation_error("config: key '" + key + "' expects a number, got '" + v + "'");
    }
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw validation_error("config: key '" + key + "' expects true/false, got '" + v + "'");
}

}  // namespace detail

/// Flat key = value text; '#' starts a comment, lists are comma separated.
/// Any unknown key is an error so typos fail fast.
inline ExperimentConfig parse_experiment_config(std::istream& in) {
    ExperimentConfig cfg;
    cfg.L_values.clear();
    cfg.K_values.clear();
    cfg.k_range.clear();
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw validation_error("config line " + std::to_string(lineno) +
                                   ": expected 'key = value'");
        std::string key = detail::trim(line.substr(0, eq));
        std::string val = detail::trim(line.substr(eq + 1));

        if (key == "N") cfg.N = detail::parse_count(key, val);
        else if (key == "W") cfg.W = detail::parse_count(key, val);
        else if (key == "window") {
            if (val != "square")
                throw validation_error("config: only 'square' windows are supported, got '" +
                                       val + "'");
        }
        else if (key == "support_start") cfg.window_support_start = detail::parse_count(key, val);
        else if (key == "L_values") {
            for (const auto& v : detail::split_list(val))
                cfg.L_values.push_back(detail::parse_count(key, v));
        }
        else if (key == "K_values") {
            for (const auto& v : detail::split_list(val))
                cfg.K_values.push_back(detail::parse_count(key, v));
        }
        else if (key == "k_range") {
            for (const auto& v : detail::split_list(val))
                cfg.k_range.push_back(detail::parse_count(key, v));
        }
        else if (key == "snr_db_values") {
            for (const auto& v : detail::split_list(val))
                cfg.snr_db_values.push_back(detail::parse_real(key, v));
        }
        else if (key == "trials_per_cell") cfg.trials_per_cell = detail::parse_count(key, val);
        else if (key == "methods") {
            for (const auto& v : detail::split_list(val)) cfg.methods.push_back(parse_method(v));
        }
        else if (key == "rng_seed") cfg.rng_seed = static_cast<std::uint64_t>(std::stoull(val));
        else if (key == "success_nmse_threshold") cfg.success_nmse_threshold = detail::parse_real(key, val);
        else if (key == "dictionary") {
            if (val == "identity") cfg.dictionary = DictionaryKind::identity;
            else if (val == "gaussian") cfg.dictionary = DictionaryKind::gaussian;
            else throw validation_error("config: dictionary must be identity or gaussian");
        }
        else if (key == "noise_model") cfg.noise_model = parse_noise_model(val);
        else if (key == "gespar_tau") cfg.gespar_tau = detail::parse_real(key, val);
        else if (key == "gespar_max_swaps") cfg.gespar_max_swaps = detail::parse_count(key, val);
        else if (key == "gespar_max_dgn_iterations")
            cfg.gespar_max_dgn_iterations = detail::parse_count(key, val);
        else if (key == "altproj_restarts") cfg.altproj_restarts = detail::parse_count(key, val);
        else if (key == "altproj_max_iterations")
            cfg.altproj_max_iterations = detail::parse_count(key, val);
        else if (key == "altproj_halt_tolerance")
            cfg.altproj_halt_tolerance = detail::parse_real(key, val);
        else if (key == "measure_wall_time") cfg.measure_wall_time = detail::parse_bool(key, val);
        else if (key == "threads") cfg.threads = detail::parse_count(key, val);
        else throw validation_error("config line " + std::to_string(lineno) + ": unknown key '" +
                                    key + "'");
    }
    cfg.validate();
    return cfg;
}

inline ExperimentConfig parse_experiment_config(const std::string& text) {
    std::istringstream ss(text);
    return parse_experiment_config(ss);
}

}  // namespace stftpr
