#pragma once
// Independent reference implementations (oracles) used by the test suites.
// Everything here is written as plain loops against the defining formulas,
// deliberately sharing no transform code with the library.

#include <cmath>
#include <complex>
#include <vector>

#include "stftpr/gespar.hpp"
#include "stftpr/stft.hpp"

namespace oracle {

using stftpr::cplx;
using stftpr::Signal;
using stftpr::Window;

inline cplx unit(double angle) { return {std::cos(angle), std::sin(angle)}; }

/// Literal windowed transform with the N-point kernel:
/// X(m,k) = sum_n x[n] g[(mL-n) mod N] e^{-i 2 pi k n / N}, k = 0..N-1.
inline std::vector<std::vector<cplx>> stft_literal(const Signal& x, const Window& g,
                                                   std::size_t L) {
    std::size_t N = x.size();
    std::size_t M = (N + L - 1) / L;
    std::vector<std::vector<cplx>> X(M, std::vector<cplx>(N, 0.0));
    for (std::size_t m = 0; m < M; ++m)
        for (std::size_t k = 0; k < N; ++k)
            for (std::size_t n = 0; n < N; ++n) {
                std::size_t widx = stftpr::wrap(static_cast<std::int64_t>(m * L) -
                                                static_cast<std::int64_t>(n), N);
                X[m][k] += x[n] * g.taps[widx] *
                           unit(-stftpr::two_pi * static_cast<double>(k * n) /
                                static_cast<double>(N));
            }
    return X;
}

/// Independent evaluation of the library's segment convention for any K:
/// the max(K, W)-point transform of the re-indexed windowed segment.
inline std::vector<std::vector<cplx>> stft_segment(const Signal& x, const Window& g,
                                                   std::size_t L, std::size_t K) {
    std::size_t N = x.size(), W = g.support_length, a = g.support_start;
    std::size_t Kd = std::max(K, W);
    std::size_t M = (N + L - 1) / L;
    std::vector<std::vector<cplx>> X(M, std::vector<cplx>(K, 0.0));
    for (std::size_t m = 0; m < M; ++m) {
        std::size_t sigma = stftpr::wrap(static_cast<std::int64_t>(m * L) -
                                         static_cast<std::int64_t>(a) -
                                         static_cast<std::int64_t>(W) + 1, N);
        for (std::size_t k = 0; k < K; ++k)
            for (std::size_t u = 0; u < W; ++u) {
                cplx tap = g.taps[(a + W - 1 - u) % N];
                X[m][k] += x[(sigma + u) % N] * tap *
                           unit(-stftpr::two_pi * static_cast<double>(k * u) /
                                static_cast<double>(Kd));
            }
    }
    return X;
}

/// The documented per-entry phase between the library grid and the literal
/// kernel at K = N: grid(m,k) = e^{+i 2 pi k sigma_m / N} X_literal(m,k).
inline cplx reindex_phase(const Window& g, std::size_t L, std::size_t N, std::size_t m,
                          std::size_t k) {
    std::size_t sigma = stftpr::wrap(static_cast<std::int64_t>(m * L) -
                                     static_cast<std::int64_t>(g.support_start) -
                                     static_cast<std::int64_t>(g.support_length) + 1, N);
    return unit(stftpr::two_pi * static_cast<double>(k * sigma) / static_cast<double>(N));
}

/// Literal overlap-add inversion (Eqs. of the K = N case): inverse N-point
/// DFT per row, then the conj(g)-weighted quotient.
inline Signal istft_literal(const std::vector<std::vector<cplx>>& X, const Window& g,
                            std::size_t L) {
    std::size_t N = g.size();
    std::size_t M = X.size();
    Signal num(N, 0.0);
    std::vector<double> den(N, 0.0);
    for (std::size_t n = 0; n < N; ++n) {
        for (std::size_t m = 0; m < M; ++m) {
            cplx xg = 0.0;
            for (std::size_t k = 0; k < N; ++k)
                xg += X[m][k] * unit(stftpr::two_pi * static_cast<double>(k * n) /
                                     static_cast<double>(N));
            xg /= static_cast<double>(N);
            std::size_t widx = stftpr::wrap(static_cast<std::int64_t>(m * L) -
                                            static_cast<std::int64_t>(n), N);
            num[n] += xg * std::conj(g.taps[widx]);
            den[n] += std::norm(g.taps[widx]);
        }
        num[n] /= den[n];
    }
    return num;
}

/// Max entrywise deviation after aligning the global phase by least squares.
inline double aligned_max_error(const Signal& estimate, const Signal& truth) {
    cplx d = 0.0;
    for (std::size_t n = 0; n < truth.size(); ++n) d += std::conj(estimate[n]) * truth[n];
    cplx rot = std::abs(d) > 0 ? d / std::abs(d) : cplx{1.0, 0.0};
    double worst = 0.0;
    for (std::size_t n = 0; n < truth.size(); ++n)
        worst = std::max(worst, std::abs(rot * estimate[n] - truth[n]));
    return worst;
}

/// Central finite differences of the quartic objective.
inline std::vector<double> fd_gradient(const std::vector<double>& s,
                                       const stftpr::QuadraticProblem& p, double h = 1e-6) {
    std::vector<double> g(s.size());
    std::vector<double> sp = s;
    for (std::size_t j = 0; j < s.size(); ++j) {
        sp[j] = s[j] + h;
        double fp = stftpr::objective(sp, p);
        sp[j] = s[j] - h;
        double fm = stftpr::objective(sp, p);
        sp[j] = s[j];
        g[j] = (fp - fm) / (2.0 * h);
    }
    return g;
}

/// Exhaustive 1-sparse solver. For support {j} and real coefficient s the
/// objective is quadratic in t = s^2 with closed-form minimizer
/// t* = max(0, sum c y / sum c^2), c_i = |a_ij|^2.
struct OneSparseSolution {
    std::size_t index = 0;
    double coefficient = 0.0;
    double objective = 0.0;
};

inline OneSparseSolution exhaustive_one_sparse(const stftpr::QuadraticProblem& p) {
    OneSparseSolution best;
    best.objective = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < p.op.D; ++j) {
        double cy = 0.0, cc = 0.0;
        for (std::size_t i = 0; i < p.op.P; ++i) {
            double c = std::norm(p.op.row(i)[j]);
            cy += c * p.y[i];
            cc += c * c;
        }
        double t = cc > 0.0 ? std::max(0.0, cy / cc) : 0.0;
        double f = 0.0;
        for (std::size_t i = 0; i < p.op.P; ++i) {
            double r = p.y[i] - std::norm(p.op.row(i)[j]) * t;
            f += r * r;
        }
        if (f < best.objective) best = {j, std::sqrt(t), f};
    }
    return best;
}

/// Double-loop power spectrum |sum_n x[n] e^{-i 2 pi p n / P}|^2.
inline std::vector<double> ps_literal(const Signal& x, std::size_t P) {
    std::vector<double> y(P);
    for (std::size_t p = 0; p < P; ++p) {
        cplx acc = 0.0;
        for (std::size_t n = 0; n < x.size(); ++n)
            acc += x[n] * unit(-stftpr::two_pi * static_cast<double>(p * n) /
                               static_cast<double>(P));
        y[p] = std::norm(acc);
    }
    return y;
}

inline Signal random_signal(std::size_t N, std::uint64_t seed) {
    stftpr::Rng rng(seed);
    Signal x(N);
    for (cplx& e : x) e = rng.gaussian_cplx();
    return x;
}

inline Signal random_nonvanishing(std::size_t N, std::uint64_t seed) {
    stftpr::Rng rng(seed);
    Signal x(N);
    for (cplx& e : x) e = (0.5 + rng.uniform()) * rng.unit_phase();
    return x;
}

}  // namespace oracle
