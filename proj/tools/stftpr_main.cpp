// Command-line frontend: condition checking, single-instance recovery from a
// measurement file, experiment sweeps from a config file, and certified
// ambiguity pair generation.
//
// Exit codes: 0 success, 1 validation error, 2 runtime/solver error.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "stftpr/stftpr.hpp"

namespace {

using namespace stftpr;

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open '" + path + "' for reading");
    return in;
}

void write_signal_to(const std::string& path, const Signal& x) {
    if (path == "-") {
        write_signal(x, std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) throw solver_error("cannot open '" + path + "' for writing");
    write_signal(x, out);
}

struct RecoverOptions {
    std::string measurements_path;
    std::string method = "gla";
    std::string window_kind = "square";
    std::string out_path = "-";
    std::size_t support_start = 0;
    std::size_t L = 0;  // 0 = take from file header
    std::size_t K = 0;
    std::size_t k = 1;
    double tau = 1e-4;
    std::size_t max_swaps = 50000;
    std::size_t max_dgn_iterations = 30;
    std::uint64_t seed = 0;
    std::size_t restarts = 50;
    std::size_t max_iterations = 1000;
    double halt_tolerance = 1e-8;
};

void run_recover(const RecoverOptions& opt) {
    if (opt.window_kind != "square")
        throw validation_error("recover: only square windows are supported on the command line");
    auto in = open_input(opt.measurements_path);
    RawMeasurements raw = read_measurements(in);
    if (opt.L != 0 && opt.L != raw.L)
        throw validation_error("recover: --L=" + std::to_string(opt.L) +
                               " does not match file header L=" + std::to_string(raw.L));
    if (opt.K != 0 && opt.K != raw.K)
        throw validation_error("recover: --K=" + std::to_string(opt.K) +
                               " does not match file header K=" + std::to_string(raw.K));
    Window window = make_window(raw.W, raw.N, opt.support_start);
    Method method = parse_method(opt.method);

    Signal est;
    double objective = 0.0;
    switch (method) {
        case Method::direct: {
            MeasurementSet ms = to_measurement_set(raw, window);
            est = direct_recover(ms, window);
            break;
        }
        case Method::gla:
        case Method::pcgp: {
            MeasurementSet ms = to_measurement_set(raw, window);
            AltProjConfig ac{opt.max_iterations, opt.restarts, opt.seed, opt.halt_tolerance};
            AltProjResult res = method == Method::gla ? gla_run(ms, window, ac)
                                                      : pcgp_run(ms, window, ac);
            est = res.estimate;
            objective = res.final_residual();
            break;
        }
        case Method::stft_gespar:
        case Method::ps_gespar: {
            // Sparsity in the identity basis for file-based recovery.
            Dictionary dict = Dictionary::identity(raw.N);
            QuadraticProblem prob;
            if (method == Method::stft_gespar) {
                prob.op = build_measurement_operator(window, raw.L, raw.K, dict);
                prob.y = raw.values;
            } else {
                prob.op = power_spectrum_operator(dict, raw.M * raw.K);
                prob.y = raw.values;  // flattened P = M*K power-spectrum samples
            }
            GesparConfig gc;
            gc.sparsity_k = opt.k;
            gc.objective_threshold = opt.tau;
            gc.max_total_swaps = opt.max_swaps;
            gc.max_dgn_iterations = opt.max_dgn_iterations;
            gc.rng_seed = opt.seed;
            GesparResult res = gespar_solve(prob, gc);
            est.assign(res.coefficients.begin(), res.coefficients.end());
            objective = res.objective_value;
            std::cerr << "gespar: " << (res.converged ? "converged" : "budget exhausted")
                      << ", objective " << res.objective_value << ", swaps " << res.swaps_used
                      << "\n";
            break;
        }
    }
    write_signal_to(opt.out_path, est);
    std::cerr << "recover: method=" << method_name(method) << " N=" << raw.N << " W=" << raw.W
              << " L=" << raw.L << " K=" << raw.K << " objective=" << objective << "\n";
}

struct ExperimentOptions {
    std::string config_path;
    std::string out_dir;
    std::size_t threads = 0;
};

void run_experiment_cmd(const ExperimentOptions& opt) {
    auto in = open_input(opt.config_path);
    ExperimentConfig cfg = parse_experiment_config(in);
    if (opt.threads != 0) cfg.threads = opt.threads;
    std::filesystem::create_directories(opt.out_dir);

    ExperimentTable table = run_experiment(cfg);
    export_results(table, ExportFormat::csv, opt.out_dir + "/results.csv");
    export_results(table, ExportFormat::svg_lineplot, opt.out_dir + "/success_rate.svg",
                   SvgMetric::success_rate);
    export_results(table, ExportFormat::svg_lineplot, opt.out_dir + "/mean_nmse.svg",
                   SvgMetric::mean_nmse);
    std::cout << "experiment: " << table.rows.size() << " cells x " << cfg.trials_per_cell
              << " trials -> " << opt.out_dir << "/results.csv\n";
}

struct ConditionsOptions {
    std::size_t N = 0, W = 0, support_start = 0;
    std::string window_kind = "square";
};

void run_check_conditions(const ConditionsOptions& opt) {
    if (opt.window_kind != "square")
        throw validation_error("check-conditions: only square windows are supported");
    Window g = make_window(opt.W, opt.N, opt.support_start);
    ConditionReport rep = check_uniqueness_conditions(g);
    auto yn = [](bool b) { return b ? "yes" : "no"; };
    std::cout << "window: square, N=" << opt.N << ", W=" << opt.W << ", support start "
              << opt.support_start << "\n";
    std::cout << "condition (i)   DFT of |g|^2 nonvanishing : " << yn(rep.cond_i)
              << "  (min |V_k| = " << rep.min_abs_dft_of_v << " at bin " << rep.vanishing_bin
              << ")\n";
    std::cout << "condition (ii)  N >= 2W-1                 : " << yn(rep.cond_ii) << "\n";
    std::cout << "condition (iii) gcd(N, W-1) = 1           : " << yn(rep.cond_iii) << "\n";
    if (rep.square_coprime_shortcut)
        std::cout << "shortcut        gcd(N, W) = 1             : "
                  << yn(*rep.square_coprime_shortcut) << "\n";
    std::cout << "unique recovery of nonvanishing signals  : " << yn(rep.all()) << "\n";
}

struct AmbiguityOptions {
    std::string kind;
    std::size_t N = 0, W = 0, L = 1;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    std::vector<std::size_t> support1, support2;  // inclusive [a, b]
    std::size_t segment_length = 0, segment_position = 0;
    std::int64_t shift = -1;       // -1 = default (maximal admissible)
    double phase_deg = 1e9;        // sentinel = random unit phase
};

void run_ambiguity(const AmbiguityOptions& opt) {
    AmbiguityPair pair;
    if (opt.kind == "separated") {
        if (opt.support1.size() != 2 || opt.support2.size() != 2)
            throw validation_error("ambiguity: --support1/--support2 expect 'start,end'");
        Window window = make_window(opt.W, opt.N, 0);
        auto to_interval = [&](const std::vector<std::size_t>& se) {
            std::size_t len = wrap(static_cast<std::int64_t>(se[1]) -
                                   static_cast<std::int64_t>(se[0]), opt.N) + 1;
            return IndexInterval{se[0] % opt.N, len};
        };
        IndexInterval i1 = to_interval(opt.support1), i2 = to_interval(opt.support2);
        Rng rng(opt.seed);
        std::vector<cplx> a1(i1.length), a2(i2.length);
        for (cplx& v : a1) v = rng.gaussian_cplx();
        for (cplx& v : a2) v = rng.gaussian_cplx();
        pair = construct_separated_ambiguity(i1, i2, a1, a2, window, {opt.L});
    } else if (opt.kind == "shift") {
        std::optional<std::size_t> shift;
        if (opt.shift >= 0) shift = static_cast<std::size_t>(opt.shift);
        std::optional<cplx> phase;
        if (opt.phase_deg < 1e8) {
            double rad = opt.phase_deg * std::numbers::pi / 180.0;
            phase = cplx{std::cos(rad), std::sin(rad)};
        }
        pair = construct_shift_ambiguity(opt.N, opt.W, opt.L, opt.segment_length,
                                         opt.segment_position, opt.seed, shift, phase);
    } else {
        throw validation_error("ambiguity: --kind must be 'separated' or 'shift'");
    }
    std::filesystem::create_directories(opt.out_dir);
    write_signal_to(opt.out_dir + "/u.txt", pair.u);
    write_signal_to(opt.out_dir + "/v.txt", pair.v);
    std::cout << "ambiguity: verified |STFT|^2 equality, max relative gap "
              << pair.certificate.max_relative_gap << " at strides {";
    for (std::size_t i = 0; i < pair.certificate.verified_strides.size(); ++i)
        std::cout << (i ? "," : "") << pair.certificate.verified_strides[i];
    std::cout << "} -> " << opt.out_dir << "/u.txt, v.txt\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stftpr: 1-D phase retrieval from STFT magnitude measurements"};
    app.require_subcommand(1);

    RecoverOptions rec;
    CLI::App* recover = app.add_subcommand("recover", "recover a signal from a measurement file");
    recover->add_option("--measurements", rec.measurements_path, "measurement file (N W L K M header)")
        ->required();
    recover->add_option("--method", rec.method, "direct | gla | pcgp | stft-gespar | ps-gespar")
        ->required();
    recover->add_option("--window", rec.window_kind, "window kind (square)");
    recover->add_option("--support-start", rec.support_start, "window support start index");
    recover->add_option("--L", rec.L, "expected stride (checked against the file header)");
    recover->add_option("--K", rec.K, "expected DFT length (checked against the file header)");
    recover->add_option("--k", rec.k, "sparsity level for the GESPAR methods");
    recover->add_option("--tau", rec.tau, "GESPAR objective threshold");
    recover->add_option("--max-swaps", rec.max_swaps, "GESPAR total swap budget");
    recover->add_option("--max-dgn-iterations", rec.max_dgn_iterations, "Gauss-Newton iteration cap");
    recover->add_option("--seed", rec.seed, "random seed");
    recover->add_option("--restarts", rec.restarts, "GLA/PCGP random restarts");
    recover->add_option("--max-iterations", rec.max_iterations, "GLA/PCGP iteration cap");
    recover->add_option("--halt-tolerance", rec.halt_tolerance, "GLA/PCGP relative halting tolerance");
    recover->add_option("--out", rec.out_path, "output signal file ('-' = stdout)");
    recover->callback([&] { run_recover(rec); });

    ExperimentOptions exp;
    CLI::App* experiment = app.add_subcommand("experiment", "run a sweep described by a config file");
    experiment->add_option("--config", exp.config_path, "experiment config file")->required();
    experiment->add_option("--out", exp.out_dir, "output directory")->required();
    experiment->add_option("--threads", exp.threads, "worker threads (0 = hardware)");
    experiment->callback([&] { run_experiment_cmd(exp); });

    ConditionsOptions cond;
    CLI::App* check = app.add_subcommand("check-conditions", "uniqueness condition report");
    check->add_option("--N", cond.N, "signal length")->required();
    check->add_option("--W", cond.W, "window length")->required();
    check->add_option("--support-start", cond.support_start, "window support start index");
    check->add_option("--window", cond.window_kind, "window kind (square)");
    check->callback([&] { run_check_conditions(cond); });

    AmbiguityOptions amb;
    CLI::App* ambiguity = app.add_subcommand("ambiguity", "emit a certified ambiguity pair");
    ambiguity->add_option("--kind", amb.kind, "separated | shift")->required();
    ambiguity->add_option("--N", amb.N, "signal length")->required();
    ambiguity->add_option("--W", amb.W, "window length")->required();
    ambiguity->add_option("--L", amb.L, "stride the pair is verified at");
    ambiguity->add_option("--seed", amb.seed, "random seed for amplitudes/phase");
    ambiguity->add_option("--out-dir", amb.out_dir, "directory for u.txt / v.txt");
    ambiguity->add_option("--support1", amb.support1, "first interval 'start,end' (separated)")
        ->delimiter(',');
    ambiguity->add_option("--support2", amb.support2, "second interval 'start,end' (separated)")
        ->delimiter(',');
    ambiguity->add_option("--segment-length", amb.segment_length, "nonzero segment length (shift)");
    ambiguity->add_option("--segment-position", amb.segment_position, "segment start index (shift)");
    ambiguity->add_option("--shift", amb.shift, "applied shift (shift kind; default maximal)");
    ambiguity->add_option("--phase-deg", amb.phase_deg, "phase factor in degrees (default random)");
    ambiguity->callback([&] { run_ambiguity(amb); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const stftpr::validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
