#pragma once
// Alternating-projection recovery from |STFT|^2 measurements: the classic
// keep-phase / replace-magnitude iteration with least-squares overlap-add
// resynthesis (GLA), and the principal-components variant (PCGP) whose
// signal update is the dominant singular pair of the shift-aligned
// time-domain matrix.

#include <cstddef>
#include <limits>

#include "stftpr/stft.hpp"

namespace stftpr {

struct AltProjConfig {
    std::size_t max_iterations = 1000;
    std::size_t restarts = 50;
    std::uint64_t rng_seed = 0;
    double halt_tolerance = 1e-8;  // relative change of the residual
    /// When set, restart 0 starts here instead of at a random signal.
    std::optional<Signal> initial_estimate;
};

struct AltProjResult {
    Signal estimate;
    /// Measurement-domain error sum_{m,k} (sqrt(y) - |X_hat|)^2 per
    /// iteration of the winning restart, including the initial point.
    std::vector<double> residual_trace;
    std::size_t best_restart = 0;

    double final_residual() const {
        return residual_trace.empty() ? std::numeric_limits<double>::infinity()
                                      : residual_trace.back();
    }
};

/// Dominant singular triple of a dense complex matrix (row-major) by power
/// iteration on A^H A. An all-zero matrix yields sigma = 0 and zero vectors.
struct SingularTriple {
    double sigma = 0.0;
    std::vector<cplx> left;
    std::vector<cplx> right;
};

inline SingularTriple top_singular_pair(const std::vector<cplx>& a, std::size_t rows,
                                        std::size_t cols,
                                        const std::vector<cplx>* right_init = nullptr,
                                        std::size_t max_iters = 100, double tol = 1e-13) {
    SingularTriple out;
    out.left.assign(rows, 0.0);
    out.right.assign(cols, 0.0);

    std::vector<cplx> v(cols, 0.0);
    double vn = 0.0;
    if (right_init && right_init->size() == cols) {
        v = *right_init;
        vn = std::sqrt(norm_sq(v));
    }
    if (vn <= 1e-300) {
        v.assign(cols, cplx{1.0 / std::sqrt(static_cast<double>(cols)), 0.0});
        vn = 1.0;
    } else {
        for (cplx& e : v) e /= vn;
    }

    // split real/imaginary planes (and the transpose) so matvecs vectorize
    std::vector<double> ar(rows * cols), ai(rows * cols), atr(rows * cols), ati(rows * cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            const cplx& e = a[i * cols + j];
            ar[i * cols + j] = e.real();
            ai[i * cols + j] = e.imag();
            atr[j * rows + i] = e.real();
            ati[j * rows + i] = e.imag();
        }
    std::vector<double> vr(cols), vi(cols), ur(rows), ui(rows);
    for (std::size_t j = 0; j < cols; ++j) {
        vr[j] = v[j].real();
        vi[j] = v[j].imag();
    }
    auto matvec = [&] {  // u = A v
        for (std::size_t i = 0; i < rows; ++i) {
            const double* rr = ar.data() + i * cols;
            const double* ri = ai.data() + i * cols;
            double sr = 0.0, si = 0.0;
            for (std::size_t j = 0; j < cols; ++j) {
                sr += rr[j] * vr[j] - ri[j] * vi[j];
                si += rr[j] * vi[j] + ri[j] * vr[j];
            }
            ur[i] = sr;
            ui[i] = si;
        }
        double n2 = 0.0;
        for (std::size_t i = 0; i < rows; ++i) n2 += ur[i] * ur[i] + ui[i] * ui[i];
        return std::sqrt(n2);
    };
    auto matvec_h = [&] {  // v = A^H u (unnormalized)
        for (std::size_t j = 0; j < cols; ++j) {
            const double* cr = atr.data() + j * rows;
            const double* ci = ati.data() + j * rows;
            double sr = 0.0, si = 0.0;
            for (std::size_t i = 0; i < rows; ++i) {
                sr += cr[i] * ur[i] + ci[i] * ui[i];
                si += cr[i] * ui[i] - ci[i] * ur[i];
            }
            vr[j] = sr;
            vi[j] = si;
        }
        double n2 = 0.0;
        for (std::size_t j = 0; j < cols; ++j) n2 += vr[j] * vr[j] + vi[j] * vi[j];
        return std::sqrt(n2);
    };

    double sigma = matvec();
    if (sigma <= 1e-300) return out;  // zero matrix
    for (std::size_t i = 0; i < rows; ++i) {
        ur[i] /= sigma;
        ui[i] /= sigma;
    }
    double sigma_prev = 0.0;
    for (std::size_t it = 0; it < max_iters; ++it) {
        double wn = matvec_h();
        if (wn <= 1e-300) break;
        for (std::size_t j = 0; j < cols; ++j) {
            vr[j] /= wn;
            vi[j] /= wn;
        }
        sigma = matvec();
        if (sigma <= 1e-300) break;
        for (std::size_t i = 0; i < rows; ++i) {
            ur[i] /= sigma;
            ui[i] /= sigma;
        }
        if (std::abs(sigma - sigma_prev) <= tol * sigma) break;
        sigma_prev = sigma;
    }
    out.sigma = sigma;
    for (std::size_t i = 0; i < rows; ++i) out.left[i] = {ur[i], ui[i]};
    for (std::size_t j = 0; j < cols; ++j) out.right[j] = {vr[j], vi[j]};
    return out;
}

namespace detail {

inline void validate_measurements_finite(const MeasurementSet& y) {
    for (double e : y.y)
        if (!std::isfinite(e))
            throw validation_error("altproj: measurement set contains non-finite entries");
}

/// Phase factor X/|X| with the convention phase = 1 below 1e-14 magnitude.
inline cplx phase_of(cplx x) {
    double m = std::abs(x);
    return m < 1e-14 ? cplx{1.0, 0.0} : x / m;
}

inline void canonicalize_phase(Signal& x) {
    std::size_t arg = 0;
    double best = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n)
        if (std::abs(x[n]) > best) { best = std::abs(x[n]); arg = n; }
    if (best <= 0.0) return;
    cplx rot = std::conj(x[arg] / best);
    for (cplx& e : x) e *= rot;
}

/// Shared multi-restart driver. `step` maps the current grid (of the
/// internal geometry) to the next signal estimate; `to_internal_grid`
/// produces that grid from a signal; `residual` is evaluated on it.
template <typename Forward, typename Residual, typename Step>
AltProjResult run_restarts(std::size_t N, const AltProjConfig& config, Forward&& forward,
                           Residual&& residual, Step&& step) {
    if (config.max_iterations < 1 || config.restarts < 1)
        throw validation_error("altproj: max_iterations and restarts must be >= 1");

    AltProjResult best;
    double best_final = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < config.restarts; ++r) {
        Signal x(N);
        if (r == 0 && config.initial_estimate) {
            if (config.initial_estimate->size() != N)
                throw validation_error("altproj: initial estimate length != N");
            x = *config.initial_estimate;
        } else {
            Rng rng(derive_seed(config.rng_seed, {0xA17Bu, r}));
            for (cplx& e : x) e = rng.gaussian_cplx();
        }

        std::vector<double> trace;
        double res_prev = std::numeric_limits<double>::infinity();
        std::size_t updates = 0;
        while (true) {
            auto grid = forward(x);
            double res = residual(grid);
            trace.push_back(res);
            if (res <= 1e-30) break;
            if (std::isfinite(res_prev) &&
                std::abs(res_prev - res) <= config.halt_tolerance * std::max(res_prev, 1e-300))
                break;
            if (updates >= config.max_iterations) break;
            x = step(grid, x);
            ++updates;
            res_prev = res;
        }
        if (trace.back() < best_final) {
            best_final = trace.back();
            best.estimate = x;
            best.residual_trace = std::move(trace);
            best.best_restart = r;
        }
    }
    canonicalize_phase(best.estimate);
    return best;
}

}  // namespace detail

/// Griffin-Lim: STFT of the current estimate, keep phases and replace
/// magnitudes by sqrt(y), invert by least-squares overlap-add, repeat.
/// Both half-steps are projections, so the residual never increases.
inline AltProjResult gla_run(const MeasurementSet& y, const Window& window,
                             const AltProjConfig& config) {
    detail::validate_measurements_finite(y);
    StftPlan plan(window, y.geom.L, y.geom.K);
    plan.require_coverage();
    if (y.y.size() != plan.geometry().M * plan.geometry().K)
        throw validation_error("gla_run: measurement array does not match geometry");

    std::vector<double> sqrt_y(y.y.size());
    for (std::size_t i = 0; i < y.y.size(); ++i) sqrt_y[i] = std::sqrt(std::max(y.y[i], 0.0));

    return detail::run_restarts(
        y.geom.N, config,
        [&](const Signal& x) { return plan.forward(x); },
        [&](const StftGrid& grid) {
            double s = 0.0;
            for (std::size_t i = 0; i < grid.values.size(); ++i) {
                double d = sqrt_y[i] - std::abs(grid.values[i]);
                s += d * d;
            }
            return s;
        },
        [&](const StftGrid& grid, const Signal&) {
            StftGrid b = grid;
            for (std::size_t i = 0; i < b.values.size(); ++i)
                b.values[i] = detail::phase_of(grid.values[i]) * sqrt_y[i];
            return plan.inverse(b);
        });
}

/// PCGP: magnitude replacement as in GLA, then a rank-one signal update.
/// The iteration always works on the full stride-1 grid internally, carrying
/// the current iterate's values at unmeasured positions and replacing
/// magnitudes only at measured rows (m multiples of L). Cyclically shifting
/// column n of the time-domain matrix T(m, n) = x[n] g[m-n] by n indices
/// turns a consistent grid into the outer product g[m] x[n], so on such data
/// the aligned matrix is exactly rank one and the dominant singular pair
/// recovers the signal.
inline AltProjResult pcgp_run(const MeasurementSet& y, const Window& window,
                              const AltProjConfig& config) {
    detail::validate_measurements_finite(y);
    std::size_t N = y.geom.N, L = y.geom.L, K = y.geom.K;
    StftPlan plan_meas(window, L, K);
    plan_meas.require_coverage();
    if (y.y.size() != plan_meas.geometry().M * plan_meas.geometry().K)
        throw validation_error("pcgp_run: measurement array does not match geometry");
    StftPlan plan_full(window, 1, K);
    const StftGeometry& gf = plan_full.geometry();
    std::size_t W = window.support_length;

    std::vector<double> sqrt_y(y.y.size());
    for (std::size_t i = 0; i < y.y.size(); ++i) sqrt_y[i] = std::sqrt(std::max(y.y[i], 0.0));

    double gnorm2 = 0.0;
    for (const cplx& t : window.taps) gnorm2 += std::norm(t);

    auto measured_row = [&](std::size_t m_meas) { return m_meas * L; };

    return detail::run_restarts(
        N, config,
        [&](const Signal& x) { return plan_full.forward(x); },
        [&](const StftGrid& grid) {
            double s = 0.0;
            for (std::size_t m = 0; m < plan_meas.geometry().M; ++m) {
                const cplx* row = grid.values.data() + measured_row(m) * K;
                for (std::size_t k = 0; k < K; ++k) {
                    double d = sqrt_y[m * K + k] - std::abs(row[k]);
                    s += d * d;
                }
            }
            return s;
        },
        [&](const StftGrid& grid, const Signal& x_prev) {
            StftGrid b = grid;
            for (std::size_t m = 0; m < plan_meas.geometry().M; ++m) {
                cplx* row = b.values.data() + measured_row(m) * K;
                for (std::size_t k = 0; k < K; ++k)
                    row[k] = detail::phase_of(row[k]) * sqrt_y[m * K + k];
            }
            // T(p, n) = per-row inverse DFT placed at its signal indices;
            // the cyclic column shift aligned(m, n) = T((m+n) mod N, n) is
            // applied while scattering.
            std::vector<cplx> seg = plan_full.row_segments(b);
            std::vector<cplx> aligned(N * N, 0.0);
            for (std::size_t p = 0; p < N; ++p) {
                std::size_t s = gf.segment_start(p);
                const cplx* srow = seg.data() + p * W;
                for (std::size_t u = 0; u < W; ++u) {
                    std::size_t n = (s + u) % N;
                    aligned[wrap(static_cast<std::int64_t>(p) - static_cast<std::int64_t>(n), N)
                                * N + n] = srow[u];
                }
            }

            // Warm start: for data consistent with x_prev the right singular
            // vector is conj(x_prev)/||x_prev||.
            std::vector<cplx> v0(N);
            for (std::size_t n = 0; n < N; ++n) v0[n] = std::conj(x_prev[n]);
            SingularTriple svd = top_singular_pair(aligned, N, N, &v0, 60, 1e-12);
            if (svd.sigma <= 0.0) return Signal(N, 0.0);

            // aligned ~ g x^T: scale and phase of the estimate from the
            // projection of the left vector onto the known window.
            cplx gh_u = 0.0;
            for (std::size_t m = 0; m < N; ++m) gh_u += std::conj(window.taps[m]) * svd.left[m];
            cplx c = svd.sigma * gh_u / gnorm2;
            Signal x(N);
            for (std::size_t n = 0; n < N; ++n) x[n] = c * std::conj(svd.right[n]);
            return x;
        });
}

}  // namespace stftpr
