#pragma once
// Shared plumbing: error types, deterministic RNG, naive DFT helpers and
// modular index arithmetic used by every other header.

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace stftpr {

using cplx = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Invalid input, geometry or configuration. CLI maps this to exit code 1.
class validation_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Unexpected runtime failure inside a solver. CLI maps this to exit code 2.
class solver_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// i reduced into [0, n), valid for any signed offset.
inline std::size_t wrap(std::int64_t i, std::size_t n) {
    std::int64_t m = static_cast<std::int64_t>(n);
    std::int64_t r = i % m;
    return static_cast<std::size_t>(r < 0 ? r + m : r);
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Fold a master seed with stream identifiers (cell coordinates, trial
/// index, ...) into an independent per-stream seed. Order sensitive.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> parts) {
    std::uint64_t s = splitmix64(master);
    for (std::uint64_t p : parts) s = splitmix64(s ^ splitmix64(p));
    return s;
}

/// mt19937_64 engine with hand-rolled distributions. The engine sequence is
/// pinned by the standard and the distributions below avoid the
/// implementation-defined std:: ones, so identical seeds give identical
/// draws on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Uniform double in [0, 1), 53 random bits.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n), unbiased (rejection sampling).
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw validation_error("Rng::below: n must be positive");
        std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
        std::uint64_t v;
        do { v = eng_(); } while (v >= limit);
        return v % n;
    }

    /// Standard normal via Box-Muller (cosine branch only, stateless).
    double gaussian() {
        double u1;
        do { u1 = uniform(); } while (u1 <= 0.0);
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    /// Complex with iid standard normal real and imaginary parts.
    cplx gaussian_cplx() {
        double re = gaussian();
        return {re, gaussian()};
    }

    cplx unit_phase() {
        double a = two_pi * uniform();
        return {std::cos(a), std::sin(a)};
    }

private:
    std::mt19937_64 eng_;
};

/// Precomputed roots of unity: w[t] = exp(-i 2 pi t / n).
struct Twiddles {
    explicit Twiddles(std::size_t n) : w(n) {
        for (std::size_t t = 0; t < n; ++t) {
            double a = -two_pi * static_cast<double>(t) / static_cast<double>(n);
            w[t] = {std::cos(a), std::sin(a)};
        }
    }
    std::vector<cplx> w;
};

/// Plain O(n^2) DFT, X[k] = sum_n x[n] e^{-i 2 pi k n / N}. Problem sizes in
/// this library stay in the hundreds, so no fast transform is needed.
inline std::vector<cplx> dft(const std::vector<cplx>& x) {
    std::size_t n = x.size();
    Twiddles tw(n);
    std::vector<cplx> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        cplx acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += x[j] * tw.w[(k * j) % n];
        out[k] = acc;
    }
    return out;
}

inline std::vector<cplx> dft(const std::vector<double>& x) {
    return dft(std::vector<cplx>(x.begin(), x.end()));
}

/// Inverse DFT with the 1/N factor.
inline std::vector<cplx> idft(const std::vector<cplx>& x) {
    std::size_t n = x.size();
    Twiddles tw(n);
    std::vector<cplx> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        cplx acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += x[j] * std::conj(tw.w[(k * j) % n]);
        out[k] = acc / static_cast<double>(n);
    }
    return out;
}

inline double norm_sq(const std::vector<cplx>& v) {
    double s = 0.0;
    for (const cplx& e : v) s += std::norm(e);
    return s;
}

inline double norm_sq(const std::vector<double>& v) {
    double s = 0.0;
    for (double e : v) s += e * e;
    return s;
}

}  // namespace stftpr
