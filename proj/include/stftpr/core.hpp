#pragma once
// Value types shared by every solver: signals, periodic windows, synthesis
// dictionaries, random sparse instances and the uniqueness-condition report.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <utility>

#include "stftpr/util.hpp"

namespace stftpr {

/// Length-N complex time-domain signal; all index arithmetic is modulo N.
using Signal = std::vector<cplx>;

/// Relative tolerance below which a DFT bin of |g|^2 counts as vanishing.
inline constexpr double kNonvanishingRelTol = 1e-10;

/// N-periodic analysis window with tight support [a, a+W-1] (mod N):
/// taps[a] and taps[a+W-1] are nonzero and everything outside is zero.
struct Window {
    std::vector<cplx> taps;      // length N, zero off support
    std::size_t support_start;   // a
    std::size_t support_length;  // W

    std::size_t size() const { return taps.size(); }
    cplx tap(std::int64_t i) const { return taps[wrap(i, taps.size())]; }
    cplx first_tap() const { return taps[support_start]; }
    cplx last_tap() const { return taps[wrap(static_cast<std::int64_t>(support_start + support_length) - 1, taps.size())]; }

    /// True when every support tap has the same modulus (square windows and
    /// their scalar multiples); enables the gcd(N, W) shortcut below.
    bool constant_modulus() const {
        double ref = std::abs(first_tap());
        for (std::size_t t = 0; t < support_length; ++t) {
            double m = std::abs(taps[wrap(static_cast<std::int64_t>(support_start + t), taps.size())]);
            if (std::abs(m - ref) > 1e-12 * std::max(1.0, ref)) return false;
        }
        return true;
    }
};

/// Square window: W unit taps starting at index a (mod N).
inline Window make_window(std::size_t W, std::size_t N, std::size_t support_start = 0) {
    if (N == 0) throw validation_error("make_window: N must be positive");
    if (W < 1 || W > N)
        throw validation_error("make_window: need 1 <= W <= N, got W=" + std::to_string(W) +
                               " N=" + std::to_string(N));
    Window g{std::vector<cplx>(N, 0.0), support_start % N, W};
    for (std::size_t t = 0; t < W; ++t) g.taps[(g.support_start + t) % N] = 1.0;
    return g;
}

/// Custom window from its W support taps; first and last tap must be nonzero
/// so that W really is the tight support length.
inline Window make_window(const std::vector<cplx>& support_taps, std::size_t N,
                          std::size_t support_start = 0) {
    std::size_t W = support_taps.size();
    if (N == 0) throw validation_error("make_window: N must be positive");
    if (W < 1 || W > N)
        throw validation_error("make_window: need 1 <= W <= N, got W=" + std::to_string(W) +
                               " N=" + std::to_string(N));
    if (std::abs(support_taps.front()) == 0.0 || std::abs(support_taps.back()) == 0.0)
        throw validation_error("make_window: first and last support tap must be nonzero");
    Window g{std::vector<cplx>(N, 0.0), support_start % N, W};
    for (std::size_t t = 0; t < W; ++t) g.taps[(g.support_start + t) % N] = support_taps[t];
    return g;
}

/// N x D synthesis operator, columns stored contiguously.
struct Dictionary {
    std::size_t rows = 0;  // N
    std::size_t cols = 0;  // D
    std::vector<cplx> data;  // column-major
    bool normalized = false;

    cplx& at(std::size_t n, std::size_t d) { return data[d * rows + n]; }
    const cplx& at(std::size_t n, std::size_t d) const { return data[d * rows + n]; }
    const cplx* column(std::size_t d) const { return data.data() + d * rows; }

    Signal apply(const std::vector<cplx>& coeffs) const {
        if (coeffs.size() != cols)
            throw validation_error("Dictionary::apply: coefficient length mismatch");
        Signal x(rows, 0.0);
        for (std::size_t d = 0; d < cols; ++d) {
            if (coeffs[d] == 0.0) continue;
            const cplx* col = column(d);
            for (std::size_t n = 0; n < rows; ++n) x[n] += col[n] * coeffs[d];
        }
        return x;
    }

    static Dictionary identity(std::size_t N) {
        Dictionary d{N, N, std::vector<cplx>(N * N, 0.0), true};
        for (std::size_t i = 0; i < N; ++i) d.at(i, i) = 1.0;
        return d;
    }
};

/// k-sparse coefficient vector together with the signal it synthesizes.
struct SparseInstance {
    std::vector<cplx> coefficients;   // length D, zero off support
    std::vector<std::size_t> support; // sorted, |support| = k
    Signal signal;                    // dictionary applied to coefficients
};

/// Conditions under which the spectrogram determines every nonvanishing
/// signal up to a global phase (checked for a window modulo N).
struct ConditionReport {
    bool cond_i = false;    // DFT of v[n] = |g[n]|^2 nonvanishing
    bool cond_ii = false;   // N >= 2W - 1
    bool cond_iii = false;  // gcd(N, W-1) = 1
    double min_abs_dft_of_v = 0.0;
    std::size_t vanishing_bin = 0;  // argmin bin of |DFT(v)|
    /// For constant-modulus windows: the closed-form shortcut gcd(N, W) = 1.
    std::optional<bool> square_coprime_shortcut;

    bool all() const { return cond_i && cond_ii && cond_iii; }
};

/// Evaluates conditions (i)-(iii): (i) numerically on the DFT of |g|^2 with
/// a relative tolerance, (ii) and (iii) by integer arithmetic. Reports,
/// never throws, for a valid window.
inline ConditionReport check_uniqueness_conditions(const Window& g) {
    std::size_t N = g.size();
    std::size_t W = g.support_length;

    std::vector<double> v(N);
    for (std::size_t n = 0; n < N; ++n) v[n] = std::norm(g.taps[n]);
    std::vector<cplx> V = dft(v);

    ConditionReport rep;
    double mn = std::abs(V[0]), mx = std::abs(V[0]);
    for (std::size_t k = 0; k < N; ++k) {
        double a = std::abs(V[k]);
        if (a < mn) { mn = a; rep.vanishing_bin = k; }
        mx = std::max(mx, a);
    }
    rep.min_abs_dft_of_v = mn;
    rep.cond_i = mn > kNonvanishingRelTol * mx;
    rep.cond_ii = N >= 2 * W - 1;
    rep.cond_iii = std::gcd(N, W - 1) == 1;
    if (g.constant_modulus()) rep.square_coprime_shortcut = std::gcd(N, W) == 1;
    return rep;
}

enum class DictionaryKind { identity, gaussian };

/// Random k-sparse instance: dictionary columns iid standard normal then
/// normalized (gaussian kind), support uniform without replacement,
/// nonzero coefficients iid real standard normal. The seed fixes every draw.
inline std::pair<Dictionary, SparseInstance> sample_sparse_instance(
    std::size_t N, std::size_t D_cols, std::size_t k, DictionaryKind kind, std::uint64_t rng_seed) {
    if (k > D_cols)
        throw validation_error("sample_sparse_instance: k=" + std::to_string(k) +
                               " exceeds dictionary columns D=" + std::to_string(D_cols));
    Rng rng(rng_seed);

    Dictionary dict;
    if (kind == DictionaryKind::identity) {
        if (N != D_cols)
            throw validation_error("sample_sparse_instance: identity dictionary requires D = N");
        dict = Dictionary::identity(N);
    } else {
        dict = Dictionary{N, D_cols, std::vector<cplx>(N * D_cols, 0.0), true};
        for (std::size_t d = 0; d < D_cols; ++d) {
            double nrm = 0.0;
            for (std::size_t n = 0; n < N; ++n) {
                double e = rng.gaussian();
                dict.at(n, d) = e;
                nrm += e * e;
            }
            nrm = std::sqrt(nrm);
            if (nrm == 0.0) nrm = 1.0;
            for (std::size_t n = 0; n < N; ++n) dict.at(n, d) /= nrm;
        }
    }

    // Support: partial Fisher-Yates over 0..D-1, then sorted.
    std::vector<std::size_t> idx(D_cols);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t t = 0; t < k; ++t)
        std::swap(idx[t], idx[t + rng.below(D_cols - t)]);
    std::vector<std::size_t> support(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(support.begin(), support.end());

    SparseInstance inst;
    inst.support = support;
    inst.coefficients.assign(D_cols, 0.0);
    for (std::size_t j : support) inst.coefficients[j] = rng.gaussian();
    inst.signal = dict.apply(inst.coefficients);
    return {std::move(dict), std::move(inst)};
}

}  // namespace stftpr
