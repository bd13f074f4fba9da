#pragma once
// Experiment orchestration: instance generation, noise injection, per-method
// recovery trials, success/NMSE aggregation over (method, k, L, K, SNR)
// sweeps, and CSV / SVG emission. The whole table is a pure function of the
// config (master seed included) regardless of thread count.

#include <atomic>
#include <bit>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <mutex>
#include <thread>

#include "stftpr/altproj.hpp"
#include "stftpr/direct.hpp"
#include "stftpr/gespar.hpp"

namespace stftpr {

enum class Method { stft_gespar, ps_gespar, gla, pcgp, direct };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::stft_gespar: return "STFT-GESPAR";
        case Method::ps_gespar: return "PS-GESPAR";
        case Method::gla: return "GLA";
        case Method::pcgp: return "PCGP";
        case Method::direct: return "DIRECT";
    }
    return "?";
}

inline Method parse_method(const std::string& s) {
    if (s == "STFT-GESPAR" || s == "stft-gespar") return Method::stft_gespar;
    if (s == "PS-GESPAR" || s == "ps-gespar") return Method::ps_gespar;
    if (s == "GLA" || s == "gla") return Method::gla;
    if (s == "PCGP" || s == "pcgp") return Method::pcgp;
    if (s == "DIRECT" || s == "direct") return Method::direct;
    throw validation_error("unknown method '" + s + "'");
}

/// Where the additive Gaussian noise enters the measurement pipeline.
enum class NoiseModel { squared_magnitude, magnitude, complex_stft };

inline const char* noise_model_name(NoiseModel m) {
    switch (m) {
        case NoiseModel::squared_magnitude: return "squared_magnitude";
        case NoiseModel::magnitude: return "magnitude";
        case NoiseModel::complex_stft: return "complex";
    }
    return "?";
}

inline NoiseModel parse_noise_model(const std::string& s) {
    if (s == "squared_magnitude") return NoiseModel::squared_magnitude;
    if (s == "magnitude") return NoiseModel::magnitude;
    if (s == "complex") return NoiseModel::complex_stft;
    throw validation_error("unknown noise model '" + s + "'");
}

struct ExperimentConfig {
    std::size_t N = 64;
    std::size_t W = 16;
    std::size_t window_support_start = 0;  // square windows
    std::vector<std::size_t> L_values;
    std::vector<std::size_t> K_values;
    std::vector<std::size_t> k_range;
    std::vector<double> snr_db_values;  // empty = noiseless
    std::size_t trials_per_cell = 100;
    std::vector<Method> methods;
    double success_nmse_threshold = 1e-2;
    std::uint64_t rng_seed = 0;
    DictionaryKind dictionary = DictionaryKind::gaussian;
    NoiseModel noise_model = NoiseModel::squared_magnitude;

    double gespar_tau = 1e-4;
    std::size_t gespar_max_swaps = 50000;
    std::size_t gespar_max_dgn_iterations = 30;

    std::size_t altproj_restarts = 50;
    std::size_t altproj_max_iterations = 1000;
    double altproj_halt_tolerance = 1e-8;

    bool measure_wall_time = true;  // false pins the wall_ms column to zero
    std::size_t threads = 0;        // 0 = hardware concurrency

    void validate() const {
        if (trials_per_cell < 1) throw validation_error("config: trials_per_cell must be >= 1");
        if (methods.empty()) throw validation_error("config: no methods selected");
        if (L_values.empty() || K_values.empty() || k_range.empty())
            throw validation_error("config: L_values, K_values and k_range must be non-empty");
        if (W < 1 || W > N) throw validation_error("config: need 1 <= W <= N");
        for (std::size_t L : L_values)
            if (L < 1 || L > N) throw validation_error("config: stride L out of range");
        for (std::size_t k : k_range)
            if (k > N) throw validation_error("config: sparsity k exceeds N");
    }
};

struct CellKey {
    Method method;
    std::size_t k = 0, L = 1, K = 0;
    std::optional<double> snr_db;
};

struct TrialResult {
    CellKey cell;
    double nmse = 0.0;
    bool success = false;
    double objective = 0.0;
    double wall_ms = 0.0;
    std::uint64_t seed = 0;
    std::string diagnostic;  // non-empty when the method raised an error
};

struct CellStats {
    CellKey cell;
    std::size_t trials = 0;
    double success_rate = 0.0;
    double mean_nmse = 0.0;
    double median_nmse = 0.0;
    double mean_wall_ms = 0.0;
};

struct ExperimentTable {
    std::vector<CellStats> rows;
};

/// Squared error after optimal global phase alignment, normalized by the
/// truth energy: min_theta ||e^{i theta} est - truth||^2 / ||truth||^2.
inline double nmse(const Signal& estimate, const Signal& truth) {
    if (estimate.size() != truth.size())
        throw validation_error("nmse: signal lengths differ");
    double tn = norm_sq(truth);
    if (tn <= 0.0) throw validation_error("nmse: truth signal is zero, metric undefined");
    cplx d = 0.0;
    for (std::size_t n = 0; n < truth.size(); ++n) d += estimate[n] * std::conj(truth[n]);
    double val = (norm_sq(estimate) + tn - 2.0 * std::abs(d)) / tn;
    return std::max(val, 0.0);
}

/// Adds iid zero-mean Gaussian noise to the squared-magnitude entries with
/// variance sigma^2 = ||y||^2 / (P 10^{snr/10}), so the expected noise
/// energy realizes the requested SNR. snr_db = +inf leaves y unchanged.
inline MeasurementSet add_noise(const MeasurementSet& y, double snr_db, std::uint64_t rng_seed) {
    if (y.noise_snr_db)
        throw validation_error("add_noise: measurement set already carries noise");
    MeasurementSet out = y;
    if (std::isinf(snr_db) && snr_db > 0) return out;
    double sigma = std::sqrt(norm_sq(y.y) / (static_cast<double>(y.y.size()) *
                                             std::pow(10.0, snr_db / 10.0)));
    Rng rng(rng_seed);
    for (double& e : out.y) e += sigma * rng.gaussian();
    out.noise_snr_db = snr_db;
    return out;
}

namespace detail {

inline void add_noise_vec(std::vector<double>& v, double snr_db, Rng& rng) {
    double sigma = std::sqrt(norm_sq(v) / (static_cast<double>(v.size()) *
                                           std::pow(10.0, snr_db / 10.0)));
    for (double& e : v) e += sigma * rng.gaussian();
}

inline void add_noise_vec(std::vector<cplx>& v, double snr_db, Rng& rng) {
    // E|n|^2 = sigma^2 split evenly over the two components.
    double sigma = std::sqrt(norm_sq(v) / (static_cast<double>(v.size()) *
                                           std::pow(10.0, snr_db / 10.0)));
    double per_comp = sigma / std::sqrt(2.0);
    for (cplx& e : v) e += cplx{per_comp * rng.gaussian(), per_comp * rng.gaussian()};
}

/// STFT measurements of x with the configured noise model applied.
inline MeasurementSet stft_measurements(const Signal& x, const Window& window, std::size_t L,
                                        std::size_t K, NoiseModel model,
                                        std::optional<double> snr_db, std::uint64_t noise_seed) {
    StftGrid grid = stft_forward(x, window, L, K);
    if (!snr_db || (std::isinf(*snr_db) && *snr_db > 0)) return magnitude_sq(grid);
    Rng rng(noise_seed);
    switch (model) {
        case NoiseModel::squared_magnitude:
            return add_noise(magnitude_sq(grid), *snr_db, noise_seed);
        case NoiseModel::magnitude: {
            std::vector<double> a(grid.values.size());
            for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::abs(grid.values[i]);
            add_noise_vec(a, *snr_db, rng);
            MeasurementSet ms{grid.geom, std::vector<double>(a.size()), *snr_db};
            for (std::size_t i = 0; i < a.size(); ++i) ms.y[i] = a[i] * a[i];
            return ms;
        }
        case NoiseModel::complex_stft: {
            std::vector<cplx> v = grid.values;
            add_noise_vec(v, *snr_db, rng);
            MeasurementSet ms{grid.geom, std::vector<double>(v.size()), *snr_db};
            for (std::size_t i = 0; i < v.size(); ++i) ms.y[i] = std::norm(v[i]);
            return ms;
        }
    }
    throw solver_error("unreachable noise model");
}

inline std::vector<double> ps_measurements(const Signal& x, std::size_t P, NoiseModel model,
                                           std::optional<double> snr_db,
                                           std::uint64_t noise_seed) {
    if (!snr_db || (std::isinf(*snr_db) && *snr_db > 0)) return ps_measure(x, P);
    Rng rng(noise_seed);
    switch (model) {
        case NoiseModel::squared_magnitude: {
            std::vector<double> y = ps_measure(x, P);
            add_noise_vec(y, *snr_db, rng);
            return y;
        }
        case NoiseModel::magnitude: {
            std::vector<cplx> s = ps_spectrum(x, P);
            std::vector<double> a(P);
            for (std::size_t i = 0; i < P; ++i) a[i] = std::abs(s[i]);
            add_noise_vec(a, *snr_db, rng);
            std::vector<double> y(P);
            for (std::size_t i = 0; i < P; ++i) y[i] = a[i] * a[i];
            return y;
        }
        case NoiseModel::complex_stft: {
            std::vector<cplx> s = ps_spectrum(x, P);
            add_noise_vec(s, *snr_db, rng);
            std::vector<double> y(P);
            for (std::size_t i = 0; i < P; ++i) y[i] = std::norm(s[i]);
            return y;
        }
    }
    throw solver_error("unreachable noise model");
}

/// Dense signal with moduli in [0.5, 1.5) and uniform phases: nonvanishing
/// by construction, the hypothesis class of the direct solver.
inline Signal nonvanishing_signal(std::size_t N, std::uint64_t seed) {
    Rng rng(seed);
    Signal x(N);
    for (cplx& e : x) e = (0.5 + rng.uniform()) * rng.unit_phase();
    return x;
}

inline std::vector<cplx> complexify(const std::vector<double>& v) {
    return std::vector<cplx>(v.begin(), v.end());
}

inline void parallel_for(std::size_t n, std::size_t threads,
                         const std::function<void(std::size_t)>& fn) {
    if (threads == 0) threads = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::string first_error;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (first_error.empty()) first_error = e.what();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (!first_error.empty()) throw solver_error("parallel task failed: " + first_error);
}

}  // namespace detail

/// One recovery trial. Method errors are captured in the diagnostic field
/// (nmse = inf, success = false) so a sweep never aborts.
inline TrialResult run_trial(const ExperimentConfig& config, const CellKey& cell,
                             std::uint64_t trial_seed) {
    TrialResult tr;
    tr.cell = cell;
    tr.seed = trial_seed;
    std::uint64_t inst_seed = derive_seed(trial_seed, {1});
    std::uint64_t noise_seed = derive_seed(trial_seed, {2});
    std::uint64_t solver_seed = derive_seed(trial_seed, {3});

    auto t0 = std::chrono::steady_clock::now();
    try {
        Window window = make_window(config.W, config.N, config.window_support_start);
        Signal truth;
        Signal est;

        switch (cell.method) {
            case Method::direct: {
                truth = detail::nonvanishing_signal(config.N, inst_seed);
                MeasurementSet y = detail::stft_measurements(truth, window, cell.L, cell.K,
                                                             config.noise_model, cell.snr_db,
                                                             noise_seed);
                est = direct_recover(y, window);
                StftGrid g = stft_forward(est, window, cell.L, cell.K);
                double res = 0.0;
                for (std::size_t i = 0; i < g.values.size(); ++i) {
                    double d = std::sqrt(std::max(y.y[i], 0.0)) - std::abs(g.values[i]);
                    res += d * d;
                }
                tr.objective = res;
                break;
            }
            case Method::gla:
            case Method::pcgp: {
                auto [dict, inst] = sample_sparse_instance(config.N, config.N, cell.k,
                                                           config.dictionary, inst_seed);
                truth = inst.signal;
                MeasurementSet y = detail::stft_measurements(truth, window, cell.L, cell.K,
                                                             config.noise_model, cell.snr_db,
                                                             noise_seed);
                AltProjConfig ac{config.altproj_max_iterations, config.altproj_restarts,
                                 solver_seed, config.altproj_halt_tolerance};
                AltProjResult res = cell.method == Method::gla ? gla_run(y, window, ac)
                                                               : pcgp_run(y, window, ac);
                est = res.estimate;
                tr.objective = res.final_residual();
                break;
            }
            case Method::stft_gespar: {
                auto [dict, inst] = sample_sparse_instance(config.N, config.N, cell.k,
                                                           config.dictionary, inst_seed);
                truth = inst.signal;
                MeasurementSet y = detail::stft_measurements(truth, window, cell.L, cell.K,
                                                             config.noise_model, cell.snr_db,
                                                             noise_seed);
                QuadraticProblem prob{build_measurement_operator(window, cell.L, cell.K, dict),
                                      y.y};
                GesparConfig gc;
                gc.sparsity_k = cell.k;
                gc.objective_threshold = config.gespar_tau;
                gc.max_total_swaps = config.gespar_max_swaps;
                gc.max_dgn_iterations = config.gespar_max_dgn_iterations;
                gc.rng_seed = solver_seed;
                GesparResult res = gespar_solve(prob, gc);
                est = dict.apply(detail::complexify(res.coefficients));
                tr.objective = res.objective_value;
                break;
            }
            case Method::ps_gespar: {
                auto [dict, inst] = sample_sparse_instance(config.N, config.N, cell.k,
                                                           config.dictionary, inst_seed);
                truth = inst.signal;
                // Measurement parity with the matched STFT cell: P = M K.
                std::size_t M = (config.N + cell.L - 1) / cell.L;
                std::size_t P = M * cell.K;
                std::vector<double> y = detail::ps_measurements(truth, P, config.noise_model,
                                                                cell.snr_db, noise_seed);
                QuadraticProblem prob{power_spectrum_operator(dict, P), std::move(y)};
                GesparConfig gc;
                gc.sparsity_k = cell.k;
                gc.objective_threshold = config.gespar_tau;
                gc.max_total_swaps = config.gespar_max_swaps;
                gc.max_dgn_iterations = config.gespar_max_dgn_iterations;
                gc.rng_seed = solver_seed;
                GesparResult res = gespar_solve(prob, gc);
                est = dict.apply(detail::complexify(res.coefficients));
                tr.objective = res.objective_value;
                break;
            }
        }

        if (norm_sq(truth) <= 0.0) {
            // k = 0 cells: the zero signal counts as recovered when the
            // estimate is (numerically) zero too.
            tr.nmse = norm_sq(est) <= 1e-24 ? 0.0 : std::numeric_limits<double>::infinity();
        } else {
            tr.nmse = nmse(est, truth);
        }
    } catch (const std::exception& e) {
        tr.nmse = std::numeric_limits<double>::infinity();
        tr.diagnostic = e.what();
    }
    tr.success = tr.nmse < config.success_nmse_threshold;
    if (config.measure_wall_time) {
        auto t1 = std::chrono::steady_clock::now();
        tr.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    }
    return tr;
}

/// Full Cartesian sweep. Per-trial seeds derive from (master seed, cell
/// coordinates, trial index), so any thread count gives the same table.
inline ExperimentTable run_experiment(const ExperimentConfig& config) {
    config.validate();
    std::vector<CellKey> cells;
    std::vector<std::optional<double>> snrs;
    if (config.snr_db_values.empty()) snrs.push_back(std::nullopt);
    else for (double s : config.snr_db_values) snrs.emplace_back(s);
    for (Method m : config.methods)
        for (std::size_t k : config.k_range)
            for (std::size_t L : config.L_values)
                for (std::size_t K : config.K_values)
                    for (auto snr : snrs) cells.push_back(CellKey{m, k, L, K, snr});

    std::size_t T = config.trials_per_cell;
    std::vector<TrialResult> results(cells.size() * T);
    detail::parallel_for(results.size(), config.threads, [&](std::size_t i) {
        const CellKey& cell = cells[i / T];
        std::size_t trial = i % T;
        std::uint64_t snr_bits = cell.snr_db ? std::bit_cast<std::uint64_t>(*cell.snr_db)
                                             : ~std::uint64_t{0};
        std::uint64_t seed = derive_seed(config.rng_seed,
                                         {static_cast<std::uint64_t>(cell.method), cell.k, cell.L,
                                          cell.K, snr_bits, trial});
        results[i] = run_trial(config, cell, seed);
    });

    ExperimentTable table;
    table.rows.reserve(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
        CellStats st;
        st.cell = cells[c];
        st.trials = T;
        std::vector<double> nmses(T);
        for (std::size_t t = 0; t < T; ++t) {
            const TrialResult& tr = results[c * T + t];
            st.success_rate += tr.success ? 1.0 : 0.0;
            st.mean_nmse += tr.nmse;
            st.mean_wall_ms += tr.wall_ms;
            nmses[t] = tr.nmse;
        }
        st.success_rate /= static_cast<double>(T);
        st.mean_nmse /= static_cast<double>(T);
        st.mean_wall_ms /= static_cast<double>(T);
        std::sort(nmses.begin(), nmses.end());
        st.median_nmse = T % 2 ? nmses[T / 2] : 0.5 * (nmses[T / 2 - 1] + nmses[T / 2]);
        table.rows.push_back(st);
    }
    return table;
}

inline std::string format_csv(const ExperimentTable& table) {
    std::string out = "method,k,L,K,snr_db,trials,success_rate,mean_nmse,median_nmse,mean_wall_ms\n";
    char buf[256];
    for (const CellStats& r : table.rows) {
        std::string snr = "inf";
        if (r.cell.snr_db) {
            std::snprintf(buf, sizeof buf, "%g", *r.cell.snr_db);
            snr = buf;
        }
        std::snprintf(buf, sizeof buf, "%s,%zu,%zu,%zu,%s,%zu,%.4f,%.6e,%.6e,%.3f\n",
                      method_name(r.cell.method), r.cell.k, r.cell.L, r.cell.K, snr.c_str(),
                      r.trials, r.success_rate, r.mean_nmse, r.median_nmse, r.mean_wall_ms);
        out += buf;
    }
    return out;
}

enum class SvgMetric { success_rate, mean_nmse };

/// Line plot of the chosen metric vs sparsity k: one panel per value of the
/// facet dimension (L when it varies, else K, else SNR), one polyline per
/// (method, remaining dimension) series.
inline std::string format_svg(const ExperimentTable& table, SvgMetric metric) {
    auto uniq = [&](auto get) {
        std::vector<std::string> keys;
        for (const CellStats& r : table.rows) {
            std::string k = get(r);
            if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
        }
        return keys;
    };
    auto fmt_snr = [](const CellKey& c) {
        if (!c.snr_db) return std::string("inf");
        char b[32];
        std::snprintf(b, sizeof b, "%g", *c.snr_db);
        return std::string(b);
    };
    std::vector<std::string> Ls = uniq([](const CellStats& r) { return std::to_string(r.cell.L); });
    std::vector<std::string> Ks = uniq([](const CellStats& r) { return std::to_string(r.cell.K); });
    std::vector<std::string> Ss = uniq([&](const CellStats& r) { return fmt_snr(r.cell); });

    enum class Facet { L, K, snr, none } facet = Facet::none;
    std::vector<std::string> facets{""};
    if (Ls.size() > 1) { facet = Facet::L; facets = Ls; }
    else if (Ks.size() > 1) { facet = Facet::K; facets = Ks; }
    else if (Ss.size() > 1) { facet = Facet::snr; facets = Ss; }

    auto facet_of = [&](const CellStats& r) {
        switch (facet) {
            case Facet::L: return std::to_string(r.cell.L);
            case Facet::K: return std::to_string(r.cell.K);
            case Facet::snr: return fmt_snr(r.cell);
            case Facet::none: return std::string("");
        }
        return std::string("");
    };
    auto series_of = [&](const CellStats& r) {
        std::string s = method_name(r.cell.method);
        if (facet != Facet::L && Ls.size() > 1) s += " L=" + std::to_string(r.cell.L);
        if (facet != Facet::K && Ks.size() > 1) s += " K=" + std::to_string(r.cell.K);
        if (facet != Facet::snr && Ss.size() > 1) s += " snr=" + fmt_snr(r.cell);
        return s;
    };

    double kmin = 1e300, kmax = -1e300;
    for (const CellStats& r : table.rows) {
        kmin = std::min(kmin, static_cast<double>(r.cell.k));
        kmax = std::max(kmax, static_cast<double>(r.cell.k));
    }
    if (kmax <= kmin) kmax = kmin + 1;

    const double w = 560, h = 260, ml = 56, mr = 168, mt = 28, mb = 34;
    const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                             "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    auto xpos = [&](double k) { return ml + (k - kmin) / (kmax - kmin) * (w - ml - mr); };
    auto ypos = [&](double v) {
        if (metric == SvgMetric::success_rate) return mt + (1.0 - v) * (h - mt - mb);
        double lv = std::log10(std::clamp(v, 1e-8, 10.0));  // log scale for NMSE
        return mt + (1.0 - (lv + 8.0) / 9.0) * (h - mt - mb);
    };

    char buf[512];
    std::string svg;
    double total_h = h * static_cast<double>(facets.size());
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" "
                  "font-family=\"sans-serif\" font-size=\"11\">\n", w, total_h);
    svg += buf;
    const char* metric_label = metric == SvgMetric::success_rate ? "success rate" : "mean NMSE (log)";

    for (std::size_t f = 0; f < facets.size(); ++f) {
        double oy = h * static_cast<double>(f);
        svg += "<g class=\"panel\" transform=\"translate(0," + std::to_string(oy) + ")\">\n";
        std::snprintf(buf, sizeof buf,
                      "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" "
                      "stroke=\"#333\"/>\n", ml, mt, w - ml - mr, h - mt - mb);
        svg += buf;
        std::string title = metric_label;
        if (facet != Facet::none) {
            const char* fn = facet == Facet::L ? "L" : facet == Facet::K ? "K" : "snr_db";
            title += std::string("  (") + fn + "=" + facets[f] + ")";
        }
        std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"18\">%s</text>\n", ml, title.c_str());
        svg += buf;
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%g\" y=\"%g\" text-anchor=\"middle\">k</text>\n",
                      ml + (w - ml - mr) / 2, h - 8);
        svg += buf;

        // series in first-appearance order within this panel
        std::vector<std::string> series;
        for (const CellStats& r : table.rows)
            if (facet_of(r) == facets[f] || facet == Facet::none) {
                std::string s = series_of(r);
                if (std::find(series.begin(), series.end(), s) == series.end()) series.push_back(s);
            }
        for (std::size_t si = 0; si < series.size(); ++si) {
            std::string pts;
            for (const CellStats& r : table.rows) {
                if ((facet != Facet::none && facet_of(r) != facets[f]) || series_of(r) != series[si])
                    continue;
                double v = metric == SvgMetric::success_rate ? r.success_rate : r.mean_nmse;
                if (!std::isfinite(v)) v = metric == SvgMetric::success_rate ? 0.0 : 10.0;
                std::snprintf(buf, sizeof buf, "%.2f,%.2f ", xpos(static_cast<double>(r.cell.k)),
                              ypos(v));
                pts += buf;
            }
            const char* color = palette[si % 8];
            std::snprintf(buf, sizeof buf,
                          "<polyline fill=\"none\" stroke=\"%s\" stroke-width=\"1.5\" "
                          "points=\"%s\"/>\n", color, pts.c_str());
            svg += buf;
            std::snprintf(buf, sizeof buf,
                          "<text x=\"%g\" y=\"%g\" fill=\"%s\">%s</text>\n", w - mr + 8,
                          mt + 14.0 * static_cast<double>(si + 1), color, series[si].c_str());
            svg += buf;
        }
        svg += "</g>\n";
    }
    svg += "</svg>\n";
    return svg;
}

enum class ExportFormat { csv, svg_lineplot };

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw solver_error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw solver_error("write to '" + path + "' failed");
}

inline void export_results(const ExperimentTable& table, ExportFormat format,
                           const std::string& path,
                           SvgMetric metric = SvgMetric::success_rate) {
    if (table.rows.empty()) throw validation_error("export_results: empty table");
    write_text_file(path, format == ExportFormat::csv ? format_csv(table)
                                                      : format_svg(table, metric));
}

}  // namespace stftpr
