#pragma once
// Constructive exact recovery for nonvanishing signals at L = 1 (circulant
// magnitude solve, then phase-difference propagation along the W-1 step
// cycle), plus the two ambiguity constructions used as adversarial oracles.

#include <cstddef>
#include <string>

#include "stftpr/stft.hpp"

namespace stftpr {

/// z[m] = |x[m]|^2, clamped to zero below 1e-12 * max(z) after the solve.
struct MagnitudeProfile {
    std::vector<double> z;
};

/// Phase differences arg(x[m-a]) - arg(x[m-a-W+1]) indexed by window
/// position m, anchored at arg(x[anchor]) = 0.
struct PhaseChain {
    std::vector<double> deltas;
    std::size_t anchor = 0;
};

/// Pair of signals certified to share every |STFT|^2 entry.
struct AmbiguityPair {
    Signal u;
    Signal v;
    struct Certificate {
        std::size_t N = 0;
        std::size_t W = 0;
        std::vector<std::size_t> verified_strides;
        double max_relative_gap = 0.0;  // worst |y_u - y_v| / max entry observed
    } certificate;
};

namespace detail {

inline void require_direct_geometry(const MeasurementSet& y) {
    if (y.geom.L != 1)
        throw validation_error("direct: the constructive solver requires L = 1 (got L=" +
                               std::to_string(y.geom.L) + "); use altproj or gespar for L > 1");
    if (y.geom.K != y.geom.N)
        throw validation_error("direct: the constructive solver requires K = N (got K=" +
                               std::to_string(y.geom.K) + ", N=" + std::to_string(y.geom.N) + ")");
}

}  // namespace detail

/// Stage one of the proof: row sums y_m = sum_k y(m,k) satisfy y = N A z for
/// the circulant A built from v[n] = |g[n]|^2, solved by DFT diagonalization.
/// Requires condition (i); magnitude recovery itself needs no nonvanishing
/// assumption. The solve is linear in y.
inline MagnitudeProfile recover_magnitudes(const MeasurementSet& y, const Window& window) {
    detail::require_direct_geometry(y);
    std::size_t N = y.geom.N;
    ConditionReport rep = check_uniqueness_conditions(window);
    if (!rep.cond_i)
        throw validation_error("recover_magnitudes: condition (i) fails, DFT bin " +
                               std::to_string(rep.vanishing_bin) + " of |g|^2 vanishes (|V|=" +
                               std::to_string(rep.min_abs_dft_of_v) + ")");

    std::vector<cplx> row_sums(N, 0.0);
    for (std::size_t m = 0; m < N; ++m) {
        double s = 0.0;
        for (std::size_t k = 0; k < N; ++k) s += y.at(m, k);
        row_sums[m] = s;
    }
    std::vector<double> v(N);
    for (std::size_t n = 0; n < N; ++n) v[n] = std::norm(window.taps[n]);

    // y = N (v (*) z), so Z[k] = Y[k] / (N V[k]).
    std::vector<cplx> Y = dft(row_sums);
    std::vector<cplx> V = dft(v);
    for (std::size_t k = 0; k < N; ++k) Y[k] /= V[k] * static_cast<double>(N);
    std::vector<cplx> zc = idft(Y);

    MagnitudeProfile prof;
    prof.z.resize(N);
    double mx = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
        prof.z[n] = zc[n].real();
        mx = std::max(mx, prof.z[n]);
    }
    for (double& e : prof.z)
        if (e < 1e-12 * mx) e = 0.0;
    return prof;
}

/// r_m[W-1] of each measurement row, divided down to the phase difference
/// arg(x[m-a]) - arg(x[m-a-W+1]). The magnitude factors |x| are positive and
/// contribute no phase, so only the window endpoint arguments are removed.
inline PhaseChain extract_phase_chain(const MeasurementSet& y, const Window& window) {
    detail::require_direct_geometry(y);
    std::size_t N = y.geom.N, W = window.support_length;
    Twiddles tw(N);
    double arg_first = std::arg(window.first_tap());
    double arg_last = std::arg(window.last_tap());

    PhaseChain chain;
    chain.deltas.resize(N);
    for (std::size_t m = 0; m < N; ++m) {
        // r[W-1] = (1/N) sum_k y(m,k) e^{+i 2 pi k (W-1) / N}
        cplx r = 0.0;
        for (std::size_t k = 0; k < N; ++k) r += y.at(m, k) * std::conj(tw.w[(k * (W - 1)) % N]);
        chain.deltas[m] = std::arg(r) - arg_first + arg_last;
    }
    return chain;
}

/// Stage two: anchors arg(x[0]) = 0 and propagates the relative phases along
/// steps of W-1 modulo N, which visits every residue exactly once when
/// gcd(N, W-1) = 1. Requires conditions (ii), (iii) and z > 0 everywhere.
inline Signal recover_phases(const MeasurementSet& y, const Window& window,
                             const MagnitudeProfile& z) {
    detail::require_direct_geometry(y);
    std::size_t N = y.geom.N, W = window.support_length, a = window.support_start;
    ConditionReport rep = check_uniqueness_conditions(window);
    if (!rep.cond_ii)
        throw validation_error("recover_phases: condition (ii) fails, need N >= 2W-1 (N=" +
                               std::to_string(N) + ", W=" + std::to_string(W) + ")");
    if (!rep.cond_iii) {
        // Report exactly the residues unreachable from 0 by steps of W-1.
        std::vector<bool> seen(N, false);
        std::size_t j = 0;
        do { seen[j] = true; j = (j + W - 1) % N; } while (!seen[j]);
        std::string unreached;
        for (std::size_t n = 0; n < N; ++n)
            if (!seen[n]) unreached += (unreached.empty() ? "" : ",") + std::to_string(n);
        throw validation_error("recover_phases: gcd(N, W-1) != 1, phase propagation cannot reach "
                               "indices {" + unreached + "}");
    }
    double mx = 0.0;
    for (double e : z.z) mx = std::max(mx, e);
    for (std::size_t n = 0; n < N; ++n)
        if (z.z[n] <= 1e-12 * mx)
            throw validation_error("recover_phases: |x[" + std::to_string(n) +
                                   "]| vanishes; the nonvanishing hypothesis is violated");

    PhaseChain chain = extract_phase_chain(y, window);

    std::vector<double> theta(N, 0.0);
    std::size_t j = 0;
    for (std::size_t step = 0; step + 1 < N; ++step) {
        std::size_t j2 = (j + W - 1) % N;
        // delta for pair (j2, j) lives at window position m = j2 + a.
        theta[j2] = theta[j] + chain.deltas[(j2 + a) % N];
        j = j2;
    }

    Signal x(N);
    for (std::size_t n = 0; n < N; ++n)
        x[n] = std::sqrt(z.z[n]) * cplx{std::cos(theta[n]), std::sin(theta[n])};
    return x;
}

/// Composition of the two proof stages: exact up to global phase on
/// noiseless data from a nonvanishing signal, with arg(x[0]) = 0 as the
/// canonical representative.
inline Signal direct_recover(const MeasurementSet& y, const Window& window) {
    MagnitudeProfile z = recover_magnitudes(y, window);
    return recover_phases(y, window, z);
}

namespace detail {

inline double verify_pair_equality(const Signal& u, const Signal& v, const Window& window,
                                   const std::vector<std::size_t>& strides, double rel_tol) {
    double worst = 0.0;
    for (std::size_t L : strides) {
        MeasurementSet yu = magnitude_sq(stft_forward(u, window, L, window.size()));
        MeasurementSet yv = magnitude_sq(stft_forward(v, window, L, window.size()));
        double mx = 0.0, gap = 0.0;
        for (std::size_t i = 0; i < yu.y.size(); ++i) {
            mx = std::max(mx, std::max(yu.y[i], yv.y[i]));
            gap = std::max(gap, std::abs(yu.y[i] - yv.y[i]));
        }
        double rel = gap / std::max(mx, 1e-300);
        worst = std::max(worst, rel);
        if (rel > rel_tol)
            throw solver_error("ambiguity construction failed verification at L=" +
                               std::to_string(L) + " (relative gap " + std::to_string(rel) + ")");
    }
    return worst;
}

}  // namespace detail

/// Circular interval [start, start + length - 1] (mod N).
struct IndexInterval {
    std::size_t start = 0;
    std::size_t length = 0;
    std::size_t last() const { return start + length - 1; }
};

/// Separated-support construction: x on [a1,b1] and y on [a2,b2] with both
/// circular gaps a2-b1 and a1-b2 at least W give u = x+y, v = x-y with equal
/// |STFT|^2 for any stride. The returned certificate records the strides the
/// pair was verified at.
inline AmbiguityPair construct_separated_ambiguity(const IndexInterval& support1,
                                                   const IndexInterval& support2,
                                                   const std::vector<cplx>& amplitudes1,
                                                   const std::vector<cplx>& amplitudes2,
                                                   const Window& window,
                                                   std::vector<std::size_t> verify_strides = {1}) {
    std::size_t N = window.size(), W = window.support_length;
    if (support1.length == 0 || support2.length == 0)
        throw validation_error("construct_separated_ambiguity: empty support interval");
    if (amplitudes1.size() != support1.length || amplitudes2.size() != support2.length)
        throw validation_error("construct_separated_ambiguity: amplitude length != interval length");
    if (support1.length + support2.length > N)
        throw validation_error("construct_separated_ambiguity: supports overlap");
    std::size_t gap12 = wrap(static_cast<std::int64_t>(support2.start) -
                             static_cast<std::int64_t>(support1.last()), N);
    std::size_t gap21 = wrap(static_cast<std::int64_t>(support1.start) -
                             static_cast<std::int64_t>(support2.last()), N);
    if (gap12 < W || gap21 < W)
        throw validation_error("construct_separated_ambiguity: circular gaps (" +
                               std::to_string(gap12) + ", " + std::to_string(gap21) +
                               ") must both be >= W=" + std::to_string(W));
    if (verify_strides.empty())
        throw validation_error("construct_separated_ambiguity: need at least one stride to verify");

    Signal x(N, 0.0), y(N, 0.0);
    for (std::size_t t = 0; t < support1.length; ++t) x[(support1.start + t) % N] = amplitudes1[t];
    for (std::size_t t = 0; t < support2.length; ++t) y[(support2.start + t) % N] = amplitudes2[t];

    AmbiguityPair pair;
    pair.u.resize(N);
    pair.v.resize(N);
    for (std::size_t n = 0; n < N; ++n) {
        pair.u[n] = x[n] + y[n];
        pair.v[n] = x[n] - y[n];
    }
    pair.certificate.N = N;
    pair.certificate.W = W;
    pair.certificate.verified_strides = verify_strides;
    pair.certificate.max_relative_gap =
        detail::verify_pair_equality(pair.u, pair.v, window, verify_strides, 1e-12);
    return pair;
}

/// Segment-shift construction (square window, W and N multiples of L): a
/// nonzero segment of length L-r placed inside one stride cell with W-L
/// zeros on each side can be shifted by up to r samples and rotated by any
/// unit phase without changing |STFT|^2 at stride L. Segment values, the
/// applied shift (default: maximal) and phase (default: random unit) are
/// drawn from the seed unless overridden.
inline AmbiguityPair construct_shift_ambiguity(std::size_t N, std::size_t W, std::size_t L,
                                               std::size_t segment_length,
                                               std::size_t segment_position,
                                               std::uint64_t rng_seed,
                                               std::optional<std::size_t> shift = std::nullopt,
                                               std::optional<cplx> phase = std::nullopt) {
    if (L < 1 || W % L != 0 || N % L != 0)
        throw validation_error("construct_shift_ambiguity: W and N must both be multiples of L");
    if (W > N) throw validation_error("construct_shift_ambiguity: need W <= N");
    if (segment_length < 1 || segment_length >= L)
        throw validation_error("construct_shift_ambiguity: segment length must satisfy "
                               "1 <= L - r <= L - 1, got " + std::to_string(segment_length) +
                               " with L=" + std::to_string(L));
    std::size_t r = L - segment_length;

    // Stride cells are [cL+1, (c+1)L]: windows at positions mL cover whole
    // cells, so content confined to one cell is seen in full or not at all.
    std::size_t p = segment_position % N;
    std::size_t cell_start = (p == 0 ? N - L + 1 : ((p - 1) / L) * L + 1) % N;
    std::size_t offset = wrap(static_cast<std::int64_t>(p) - static_cast<std::int64_t>(cell_start), N);
    if (offset + segment_length > L)
        throw validation_error("construct_shift_ambiguity: segment does not fit inside one stride "
                               "cell at position " + std::to_string(segment_position));
    std::size_t room = L - segment_length - offset;

    Rng rng(rng_seed);
    std::size_t sh = shift.value_or(std::min(r, room));
    cplx ph = phase.value_or(rng.unit_phase());
    if (sh > r)
        throw validation_error("construct_shift_ambiguity: shift " + std::to_string(sh) +
                               " exceeds r=" + std::to_string(r));
    if (sh > room)
        throw validation_error("construct_shift_ambiguity: shifted segment leaves its stride cell");
    if (std::abs(std::abs(ph) - 1.0) > 1e-12)
        throw validation_error("construct_shift_ambiguity: phase factor must have unit modulus");

    AmbiguityPair pair;
    pair.u.assign(N, 0.0);
    pair.v.assign(N, 0.0);
    for (std::size_t t = 0; t < segment_length; ++t) {
        cplx val = rng.gaussian_cplx();
        pair.u[(p + t) % N] = val;
        pair.v[(p + t + sh) % N] = ph * val;
    }
    pair.certificate.N = N;
    pair.certificate.W = W;
    pair.certificate.verified_strides = {L};
    pair.certificate.max_relative_gap =
        detail::verify_pair_equality(pair.u, pair.v, make_window(W, N, 0), {L}, 1e-12);
    return pair;
}

}  // namespace stftpr
