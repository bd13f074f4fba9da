#pragma once
// Forward STFT with periodically extended windows, squared-magnitude
// measurement extraction, least-squares overlap-add inversion and the dense
// linear rows of the quadratic measurement model.
//
// Transform convention. The grid entry (m, k) is the Kd-point DFT
// (Kd = max(K, W)) of the length-W windowed segment re-indexed to 0..W-1:
//
//   seg_m[u] = x[(sigma_m + u) mod N] * g[(a + W - 1 - u) mod N],
//   sigma_m  = (m L - a - W + 1) mod N,
//   X(m, k)  = sum_u seg_m[u] e^{-i 2 pi k u / Kd},    k = 0..K-1.
//
// For K = N this equals the windowed N-point DFT of x[n] g[mL - n] up to the
// linear phase e^{+i 2 pi k sigma_m / N} per entry, so every magnitude -- the
// only observed quantity -- is identical. For K >= W the K-point DFT of the
// segment is taken; for K < W the W-point DFT is taken and only the first K
// (low-frequency) bins are kept.

#include <cstddef>
#include <optional>
#include <string>

#include "stftpr/core.hpp"

namespace stftpr {

/// Grid geometry: window positions m*L for m = 0..M-1 with M = ceil(N/L).
struct StftGeometry {
    std::size_t N = 0;
    std::size_t L = 1;
    std::size_t K = 0;
    std::size_t M = 0;
    Window window;

    std::size_t dft_len() const { return std::max(K, window.support_length); }
    std::size_t segment_start(std::size_t m) const {
        return wrap(static_cast<std::int64_t>(m * L) -
                        static_cast<std::int64_t>(window.support_start) -
                        static_cast<std::int64_t>(window.support_length) + 1,
                    N);
    }
};

inline StftGeometry make_geometry(const Window& window, std::size_t L, std::size_t K) {
    std::size_t N = window.size();
    if (L < 1 || L > N)
        throw validation_error("stft: need 1 <= L <= N, got L=" + std::to_string(L));
    if (K < 1) throw validation_error("stft: DFT length K must be positive");
    return StftGeometry{N, L, K, (N + L - 1) / L, window};
}

struct StftGrid {
    StftGeometry geom;
    std::vector<cplx> values;  // M x K, row-major

    cplx& at(std::size_t m, std::size_t k) { return values[m * geom.K + k]; }
    const cplx& at(std::size_t m, std::size_t k) const { return values[m * geom.K + k]; }
};

/// Squared-magnitude STFT samples plus the geometry that produced them.
struct MeasurementSet {
    StftGeometry geom;
    std::vector<double> y;  // M x K, row-major, nonnegative when noiseless
    std::optional<double> noise_snr_db;

    double& at(std::size_t m, std::size_t k) { return y[m * geom.K + k]; }
    const double& at(std::size_t m, std::size_t k) const { return y[m * geom.K + k]; }
};

/// Reusable transform state for one geometry: reversed window segment,
/// flattened twiddle tables (split into real and imaginary planes so the
/// inner products vectorize) and the overlap-add denominator. The
/// alternating-projection solvers run thousands of transforms per geometry
/// through one plan.
class StftPlan {
public:
    StftPlan(const Window& window, std::size_t L, std::size_t K)
        : geom_(make_geometry(window, L, K)) {
        std::size_t N = geom_.N, W = window.support_length, Kd = geom_.dft_len();
        wseg_.resize(W);
        for (std::size_t u = 0; u < W; ++u)
            wseg_[u] = window.tap(static_cast<std::int64_t>(window.support_start + W - 1 - u));
        ola_denom_.assign(N, 0.0);
        for (std::size_t m = 0; m < geom_.M; ++m) {
            std::size_t s = geom_.segment_start(m);
            for (std::size_t u = 0; u < W; ++u)
                ola_denom_[(s + u) % N] += std::norm(wseg_[u]);
        }
        // fwd[k][u] = exp(-i 2 pi k u / Kd), inv[u][k] = conj(fwd[k][u]) / Kd
        fwd_re_.resize(K * W);
        fwd_im_.resize(K * W);
        inv_re_.resize(W * K);
        inv_im_.resize(W * K);
        for (std::size_t k = 0; k < K; ++k)
            for (std::size_t u = 0; u < W; ++u) {
                double a = -two_pi * static_cast<double>((k * u) % Kd) / static_cast<double>(Kd);
                double re = std::cos(a), im = std::sin(a);
                fwd_re_[k * W + u] = re;
                fwd_im_[k * W + u] = im;
                inv_re_[u * K + k] = re / static_cast<double>(Kd);
                inv_im_[u * K + k] = -im / static_cast<double>(Kd);
            }
    }

    const StftGeometry& geometry() const { return geom_; }

    StftGrid forward(const Signal& x) const {
        std::size_t N = geom_.N, W = wseg_.size(), K = geom_.K;
        if (x.size() != N) throw validation_error("stft_forward: signal length != N");
        StftGrid grid{geom_, std::vector<cplx>(geom_.M * K)};
        std::vector<double> seg_re(W), seg_im(W);
        for (std::size_t m = 0; m < geom_.M; ++m) {
            std::size_t s = geom_.segment_start(m);
            for (std::size_t u = 0; u < W; ++u) {
                cplx v = x[(s + u) % N] * wseg_[u];
                seg_re[u] = v.real();
                seg_im[u] = v.imag();
            }
            cplx* out = grid.values.data() + m * K;
            for (std::size_t k = 0; k < K; ++k) {
                const double* tr = fwd_re_.data() + k * W;
                const double* ti = fwd_im_.data() + k * W;
                double ar = 0.0, ai = 0.0;
                for (std::size_t u = 0; u < W; ++u) {
                    ar += seg_re[u] * tr[u] - seg_im[u] * ti[u];
                    ai += seg_re[u] * ti[u] + seg_im[u] * tr[u];
                }
                out[k] = {ar, ai};
            }
        }
        return grid;
    }

    /// Per-row inverse DFT of the grid, returned as M x W segment values
    /// (missing bins of the W-point transform treated as zero when K < W).
    std::vector<cplx> row_segments(const StftGrid& grid) const {
        std::size_t W = wseg_.size(), K = geom_.K;
        std::vector<cplx> seg(geom_.M * W);
        std::vector<double> row_re(K), row_im(K);
        for (std::size_t m = 0; m < geom_.M; ++m) {
            const cplx* row = grid.values.data() + m * K;
            for (std::size_t k = 0; k < K; ++k) {
                row_re[k] = row[k].real();
                row_im[k] = row[k].imag();
            }
            cplx* out = seg.data() + m * W;
            for (std::size_t u = 0; u < W; ++u) {
                const double* tr = inv_re_.data() + u * K;
                const double* ti = inv_im_.data() + u * K;
                double ar = 0.0, ai = 0.0;
                for (std::size_t k = 0; k < K; ++k) {
                    ar += row_re[k] * tr[k] - row_im[k] * ti[k];
                    ai += row_re[k] * ti[k] + row_im[k] * tr[k];
                }
                out[u] = {ar, ai};
            }
        }
        return seg;
    }

    /// Least-squares inversion: per-row inverse DFT, then the overlap-add
    /// quotient over all window positions.
    Signal inverse(const StftGrid& grid) const {
        std::size_t N = geom_.N, W = wseg_.size();
        require_coverage();
        std::vector<cplx> seg = row_segments(grid);
        Signal num(N, 0.0);
        for (std::size_t m = 0; m < geom_.M; ++m) {
            std::size_t s = geom_.segment_start(m);
            const cplx* srow = seg.data() + m * W;
            for (std::size_t u = 0; u < W; ++u)
                num[(s + u) % N] += srow[u] * std::conj(wseg_[u]);
        }
        for (std::size_t n = 0; n < N; ++n) num[n] /= ola_denom_[n];
        return num;
    }

    const std::vector<double>& overlap_denominator() const { return ola_denom_; }
    const std::vector<cplx>& reversed_support_taps() const { return wseg_; }

    void require_coverage() const {
        std::string missing;
        for (std::size_t n = 0; n < geom_.N; ++n)
            if (ola_denom_[n] <= 0.0) missing += (missing.empty() ? "" : ",") + std::to_string(n);
        if (!missing.empty())
            throw validation_error("istft: window positions leave samples uncovered at indices {" +
                                   missing + "}");
    }

private:
    StftGeometry geom_;
    std::vector<cplx> wseg_;  // g[(a+W-1-u) mod N], u = 0..W-1
    std::vector<double> fwd_re_, fwd_im_;  // K x W
    std::vector<double> inv_re_, inv_im_;  // W x K
    std::vector<double> ola_denom_;
};

inline StftGrid stft_forward(const Signal& x, const Window& window, std::size_t L, std::size_t K) {
    return StftPlan(window, L, K).forward(x);
}

inline MeasurementSet magnitude_sq(const StftGrid& grid) {
    MeasurementSet ms{grid.geom, std::vector<double>(grid.values.size()), std::nullopt};
    for (std::size_t i = 0; i < grid.values.size(); ++i) ms.y[i] = std::norm(grid.values[i]);
    return ms;
}

inline Signal istft(const StftGrid& grid, const Window& window, std::size_t L) {
    StftPlan plan(window, L, grid.geom.K);
    return plan.inverse(grid);
}

/// P = M*K dense linear functionals; evaluating |row . s|^2 over all rows
/// reproduces magnitude_sq(stft_forward(D s)).
struct MeasurementOperator {
    std::size_t P = 0;  // measurement count
    std::size_t D = 0;  // coefficient dimension
    std::vector<cplx> rows;  // row-major P x D

    const cplx* row(std::size_t p) const { return rows.data() + p * D; }

    cplx row_dot(std::size_t p, const std::vector<double>& s) const {
        const cplx* r = row(p);
        cplx acc = 0.0;
        for (std::size_t d = 0; d < D; ++d) acc += r[d] * s[d];
        return acc;
    }

    cplx row_dot(std::size_t p, const std::vector<cplx>& s) const {
        const cplx* r = row(p);
        cplx acc = 0.0;
        for (std::size_t d = 0; d < D; ++d) acc += r[d] * s[d];
        return acc;
    }

    /// |row . s|^2 for every row (the forward quadratic measurement map).
    std::vector<double> evaluate(const std::vector<double>& s) const {
        std::vector<double> out(P);
        for (std::size_t p = 0; p < P; ++p) out[p] = std::norm(row_dot(p, s));
        return out;
    }
};

/// Row (m, k) is the k-th DFT functional of the windowed segment composed
/// with the dictionary: row[(m,k)][d] = sum_u wseg[u] e^{-i2pi ku/Kd}
/// D[(sigma_m+u) mod N, d].
inline MeasurementOperator build_measurement_operator(const Window& window, std::size_t L,
                                                      std::size_t K, const Dictionary& dict) {
    StftGeometry geom = make_geometry(window, L, K);
    if (dict.rows != geom.N)
        throw validation_error("build_measurement_operator: dictionary has " +
                               std::to_string(dict.rows) + " rows, expected N=" +
                               std::to_string(geom.N));
    std::size_t N = geom.N, W = window.support_length, Kd = geom.dft_len();
    Twiddles tw(Kd);
    std::vector<cplx> wseg(W);
    for (std::size_t u = 0; u < W; ++u)
        wseg[u] = window.tap(static_cast<std::int64_t>(window.support_start + W - 1 - u));

    MeasurementOperator op{geom.M * K, dict.cols, {}};
    op.rows.assign(op.P * op.D, 0.0);
    for (std::size_t m = 0; m < geom.M; ++m) {
        std::size_t s = geom.segment_start(m);
        for (std::size_t k = 0; k < K; ++k) {
            cplx* row = op.rows.data() + (m * K + k) * op.D;
            for (std::size_t u = 0; u < W; ++u) {
                cplx w = wseg[u] * tw.w[(k * u) % Kd];
                const cplx* dict_row = dict.data.data() + ((s + u) % N);
                for (std::size_t d = 0; d < op.D; ++d) row[d] += w * dict_row[d * N];
            }
        }
    }
    return op;
}

}  // namespace stftpr
