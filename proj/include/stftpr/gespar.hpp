#pragma once
// Greedy sparse phase retrieval from general quadratic measurements
// y_p = |a_p . s|^2: the quartic least-squares objective, its gradient,
// support-restricted damped Gauss-Newton, and 2-opt support search with
// random restarts. Also the oversampled power-spectrum measurement builder
// used for the Fourier-magnitude baseline.
//
// The optimization path is real-valued (instances draw real coefficients);
// a Wirtinger-style gradient for complex coefficients is provided for API
// completeness but no solver is built on it.

#include <algorithm>
#include <cstddef>
#include <limits>

#include "stftpr/stft.hpp"

namespace stftpr {

enum class SwapStrategy {
    /// Remove support indices by ascending |s_j|, insert off-support indices
    /// by descending |grad f|, accept the first strict improvement.
    ordered,
    /// Evaluate every (remove, insert) pair each round and accept the best
    /// strict improvement. Only sensible on small instances.
    exhaustive,
};

struct GesparConfig {
    std::size_t sparsity_k = 1;
    double objective_threshold = 1e-4;  // tau
    std::size_t max_total_swaps = 50000;
    std::size_t max_dgn_iterations = 30;
    std::uint64_t rng_seed = 0;
    SwapStrategy swap_strategy = SwapStrategy::ordered;
    /// Test instrumentation: when set, receives the objective of every
    /// support candidate the search evaluated.
    std::vector<double>* candidate_trace = nullptr;
};

struct QuadraticProblem {
    MeasurementOperator op;
    std::vector<double> y;  // length P
};

struct GesparResult {
    std::vector<double> coefficients;  // length D, zero off support
    std::vector<std::size_t> support;
    double objective_value = std::numeric_limits<double>::infinity();
    std::size_t swaps_used = 0;
    bool converged = false;  // objective_value < tau
};

inline void validate_problem(const QuadraticProblem& p) {
    if (p.y.size() != p.op.P)
        throw validation_error("gespar: measurement vector length " + std::to_string(p.y.size()) +
                               " != operator row count P=" + std::to_string(p.op.P));
}

/// f(s) = sum_p (y_p - |a_p . s|^2)^2.
inline double objective(const std::vector<double>& s, const QuadraticProblem& p) {
    validate_problem(p);
    if (s.size() != p.op.D) throw validation_error("gespar objective: coefficient length != D");
    double f = 0.0;
    for (std::size_t i = 0; i < p.op.P; ++i) {
        double r = p.y[i] - std::norm(p.op.row_dot(i, s));
        f += r * r;
    }
    return f;
}

/// grad f(s)_j = -4 sum_p (y_p - |u_p|^2) Re(conj(u_p) a_pj), u_p = a_p . s.
inline std::vector<double> gradient(const std::vector<double>& s, const QuadraticProblem& p) {
    validate_problem(p);
    if (s.size() != p.op.D) throw validation_error("gespar gradient: coefficient length != D");
    std::vector<double> g(p.op.D, 0.0);
    for (std::size_t i = 0; i < p.op.P; ++i) {
        cplx u = p.op.row_dot(i, s);
        double c = -4.0 * (p.y[i] - std::norm(u));
        const cplx* row = p.op.row(i);
        for (std::size_t d = 0; d < p.op.D; ++d)
            g[d] += c * (u.real() * row[d].real() + u.imag() * row[d].imag());
    }
    return g;
}

/// Complex-coefficient gradient in the Wirtinger convention, returned as
/// 2 df/d(conj s) (the steepest-descent direction for real-valued f).
inline std::vector<cplx> wirtinger_gradient(const std::vector<cplx>& s, const QuadraticProblem& p) {
    validate_problem(p);
    if (s.size() != p.op.D) throw validation_error("gespar gradient: coefficient length != D");
    std::vector<cplx> g(p.op.D, 0.0);
    for (std::size_t i = 0; i < p.op.P; ++i) {
        cplx u = p.op.row_dot(i, s);
        cplx c = -4.0 * (p.y[i] - std::norm(u)) * u;
        const cplx* row = p.op.row(i);
        for (std::size_t d = 0; d < p.op.D; ++d) g[d] += c * std::conj(row[d]);
    }
    return g;
}

namespace detail {

/// Support-restricted damped Gauss-Newton with reusable buffers. One
/// instance serves every candidate evaluation inside a solve.
class DgnWorkspace {
public:
    explicit DgnWorkspace(const QuadraticProblem& p) : prob_(p), P_(p.op.P) {}

    /// Minimizes f over the given support starting from s (length |support|,
    /// updated in place). Returns the final objective. Accepted steps never
    /// increase the objective; stops on max_iters, step norm < 1e-10,
    /// objective < 1e-30, or a failed backtracking search (20 halvings).
    double run(const std::vector<std::size_t>& support, std::vector<double>& s,
               std::size_t max_iters, std::vector<double>* objective_trace = nullptr) {
        std::size_t T = support.size();
        if (T == 0) throw validation_error("damped_gauss_newton: empty support");
        resize(T);
        gather(support);

        apply(s.data(), ur_.data(), ui_.data());
        double f = residuals_and_objective();
        if (objective_trace) objective_trace->push_back(f);

        for (std::size_t iter = 0; iter < max_iters; ++iter) {
            if (f < 1e-30) break;
            // J_pj = -2 (Ar_pj ur_p + Ai_pj ui_p), column-major.
            for (std::size_t j = 0; j < T; ++j) {
                const double* ar = Ar_.data() + j * P_;
                const double* ai = Ai_.data() + j * P_;
                double* col = J_.data() + j * P_;
                for (std::size_t q = 0; q < P_; ++q)
                    col[q] = -2.0 * (ar[q] * ur_[q] + ai[q] * ui_[q]);
            }
            for (std::size_t i = 0; i < T; ++i) {
                const double* ci = J_.data() + i * P_;
                for (std::size_t j = i; j < T; ++j) {
                    const double* cj = J_.data() + j * P_;
                    double acc = 0.0;
                    for (std::size_t q = 0; q < P_; ++q) acc += ci[q] * cj[q];
                    jtj_[i * T + j] = acc;
                    jtj_[j * T + i] = acc;
                }
                double acc = 0.0;
                for (std::size_t q = 0; q < P_; ++q) acc += ci[q] * rho_[q];
                jtr_[i] = -acc;  // solve JtJ delta = -Jt rho
            }
            if (!solve_spd(T)) break;

            apply(delta_.data(), wr_.data(), wi_.data());
            double t = 1.0;
            double f_new = 0.0;
            bool accepted = false;
            for (int h = 0; h <= 20; ++h) {
                f_new = objective_along(t);
                if (f_new < f) { accepted = true; break; }
                t *= 0.5;
            }
            if (!accepted) break;

            double step_sq = 0.0;
            for (std::size_t j = 0; j < T; ++j) {
                s[j] += t * delta_[j];
                step_sq += t * delta_[j] * t * delta_[j];
            }
            for (std::size_t q = 0; q < P_; ++q) {
                ur_[q] += t * wr_[q];
                ui_[q] += t * wi_[q];
            }
            f = residuals_and_objective();
            if (objective_trace) objective_trace->push_back(f);
            if (step_sq < 1e-10 * 1e-10) break;
        }
        return f;
    }

private:
    void resize(std::size_t T) {
        Ar_.resize(T * P_);
        Ai_.resize(T * P_);
        J_.resize(T * P_);
        jtj_.resize(T * T);
        chol_.resize(T * T);
        jtr_.resize(T);
        delta_.resize(T);
        ur_.resize(P_);
        ui_.resize(P_);
        wr_.resize(P_);
        wi_.resize(P_);
        rho_.resize(P_);
    }

    void gather(const std::vector<std::size_t>& support) {
        std::size_t D = prob_.op.D;
        for (std::size_t j = 0; j < support.size(); ++j) {
            const cplx* col = prob_.op.rows.data() + support[j];
            double* ar = Ar_.data() + j * P_;
            double* ai = Ai_.data() + j * P_;
            for (std::size_t q = 0; q < P_; ++q) {
                ar[q] = col[q * D].real();
                ai[q] = col[q * D].imag();
            }
        }
    }

    void apply(const double* coeff, double* outr, double* outi) const {
        std::size_t T = jtr_.size();
        std::fill(outr, outr + P_, 0.0);
        std::fill(outi, outi + P_, 0.0);
        for (std::size_t j = 0; j < T; ++j) {
            double c = coeff[j];
            if (c == 0.0) continue;
            const double* ar = Ar_.data() + j * P_;
            const double* ai = Ai_.data() + j * P_;
            for (std::size_t q = 0; q < P_; ++q) {
                outr[q] += c * ar[q];
                outi[q] += c * ai[q];
            }
        }
    }

    double residuals_and_objective() {
        double f = 0.0;
        for (std::size_t q = 0; q < P_; ++q) {
            double r = prob_.y[q] - (ur_[q] * ur_[q] + ui_[q] * ui_[q]);
            rho_[q] = r;
            f += r * r;
        }
        return f;
    }

    double objective_along(double t) const {
        double f = 0.0;
        for (std::size_t q = 0; q < P_; ++q) {
            double ar = ur_[q] + t * wr_[q];
            double ai = ui_[q] + t * wi_[q];
            double r = prob_.y[q] - (ar * ar + ai * ai);
            f += r * r;
        }
        return f;
    }

    /// Cholesky solve of jtj_ delta = jtr_ with diagonal regularization
    /// lambda = 1e-12 trace/T escalated on failure; never throws.
    bool solve_spd(std::size_t T) {
        double trace = 0.0;
        for (std::size_t i = 0; i < T; ++i) trace += jtj_[i * T + i];
        double lambda = 0.0;
        for (int attempt = 0; attempt < 4; ++attempt) {
            chol_ = jtj_;
            if (lambda > 0.0)
                for (std::size_t i = 0; i < T; ++i) chol_[i * T + i] += lambda;
            if (cholesky(T)) {
                back_substitute(T);
                return true;
            }
            lambda = lambda == 0.0 ? 1e-12 * std::max(trace, 1e-300) / static_cast<double>(T)
                                   : lambda * 100.0;
        }
        return false;
    }

    bool cholesky(std::size_t T) {
        for (std::size_t i = 0; i < T; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                double sum = chol_[i * T + j];
                for (std::size_t q = 0; q < j; ++q) sum -= chol_[i * T + q] * chol_[j * T + q];
                if (i == j) {
                    if (sum <= 0.0 || !std::isfinite(sum)) return false;
                    chol_[i * T + i] = std::sqrt(sum);
                } else {
                    chol_[i * T + j] = sum / chol_[j * T + j];
                }
            }
        }
        return true;
    }

    void back_substitute(std::size_t T) {
        for (std::size_t i = 0; i < T; ++i) {
            double sum = jtr_[i];
            for (std::size_t q = 0; q < i; ++q) sum -= chol_[i * T + q] * delta_[q];
            delta_[i] = sum / chol_[i * T + i];
        }
        for (std::size_t ii = T; ii-- > 0;) {
            double sum = delta_[ii];
            for (std::size_t q = ii + 1; q < T; ++q) sum -= chol_[q * T + ii] * delta_[q];
            delta_[ii] = sum / chol_[ii * T + ii];
        }
    }

    const QuadraticProblem& prob_;
    std::size_t P_;
    std::vector<double> Ar_, Ai_, J_, jtj_, chol_, jtr_, delta_;
    std::vector<double> ur_, ui_, wr_, wi_, rho_;
};

}  // namespace detail

/// Support-restricted damped Gauss-Newton. `init` holds the coefficients on
/// `support` (same order); returns the optimized coefficients on support.
inline std::vector<double> damped_gauss_newton(const std::vector<std::size_t>& support,
                                               std::vector<double> init,
                                               const QuadraticProblem& problem,
                                               std::size_t max_iters,
                                               std::vector<double>* objective_trace = nullptr) {
    validate_problem(problem);
    if (init.size() != support.size())
        throw validation_error("damped_gauss_newton: init length != support size");
    for (std::size_t j : support)
        if (j >= problem.op.D) throw validation_error("damped_gauss_newton: support index out of range");
    detail::DgnWorkspace ws(problem);
    ws.run(support, init, max_iters, objective_trace);
    return init;
}

/// 2-opt local search with random restarts. Every evaluated (remove, insert)
/// pair counts one swap against the budget, rejected ones included; a fresh
/// random support is drawn whenever no candidate improves. Terminates when
/// the objective drops below tau (converged) or the budget is exhausted
/// (best solution found is returned).
inline GesparResult gespar_solve(const QuadraticProblem& problem, const GesparConfig& config) {
    validate_problem(problem);
    std::size_t D = problem.op.D, k = config.sparsity_k;
    if (k > D)
        throw validation_error("gespar_solve: sparsity k=" + std::to_string(k) +
                               " exceeds dimension D=" + std::to_string(D));
    if (config.objective_threshold <= 0.0)
        throw validation_error("gespar_solve: tau must be positive");
    if (config.max_total_swaps < 1)
        throw validation_error("gespar_solve: max_total_swaps must be >= 1");

    GesparResult best;
    best.coefficients.assign(D, 0.0);
    best.objective_value = norm_sq(problem.y);  // objective of the zero vector

    if (k == 0) {
        best.converged = best.objective_value < config.objective_threshold;
        return best;
    }

    Rng rng(config.rng_seed);
    detail::DgnWorkspace ws(problem);

    std::vector<std::size_t> support;
    std::vector<double> s_sup;
    double f_cur = std::numeric_limits<double>::infinity();

    auto record_best = [&](const std::vector<std::size_t>& sup, const std::vector<double>& s, double f) {
        if (config.candidate_trace) config.candidate_trace->push_back(f);
        if (f < best.objective_value) {
            best.objective_value = f;
            best.support = sup;
            std::fill(best.coefficients.begin(), best.coefficients.end(), 0.0);
            for (std::size_t j = 0; j < sup.size(); ++j) best.coefficients[sup[j]] = s[j];
        }
    };
    auto finish = [&](std::size_t swaps) {
        best.swaps_used = swaps;
        best.converged = best.objective_value < config.objective_threshold;
        return best;
    };
    auto draw_restart = [&]() {
        std::vector<std::size_t> idx(D);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        for (std::size_t t = 0; t < k; ++t) std::swap(idx[t], idx[t + rng.below(D - t)]);
        support.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
        std::sort(support.begin(), support.end());
        s_sup.resize(k);
        for (double& c : s_sup) c = rng.gaussian();
        f_cur = ws.run(support, s_sup, config.max_dgn_iterations);
        record_best(support, s_sup, f_cur);
    };

    if (k == D) {  // support forced, no swaps possible
        draw_restart();
        return finish(0);
    }

    // Full coefficient view and gradient at the current support solution.
    std::vector<double> s_full(D, 0.0);
    auto refresh_full = [&]() {
        std::fill(s_full.begin(), s_full.end(), 0.0);
        for (std::size_t j = 0; j < k; ++j) s_full[support[j]] = s_sup[j];
    };

    std::size_t swaps = 0;
    while (true) {
        draw_restart();
        if (f_cur < config.objective_threshold) return finish(swaps);
        if (swaps >= config.max_total_swaps) return finish(swaps);

        bool improving = true;
        while (improving) {
            improving = false;
            refresh_full();
            std::vector<double> g = gradient(s_full, problem);

            // Removal candidates by ascending |s_j|, insertions by
            // descending |grad_j|; ties break toward the smaller index.
            std::vector<std::size_t> removals(k);
            std::iota(removals.begin(), removals.end(), std::size_t{0});
            std::stable_sort(removals.begin(), removals.end(), [&](std::size_t a, std::size_t b) {
                return std::abs(s_sup[a]) < std::abs(s_sup[b]);
            });
            std::vector<std::size_t> insertions;
            insertions.reserve(D - k);
            for (std::size_t d = 0; d < D; ++d)
                if (!std::binary_search(support.begin(), support.end(), d)) insertions.push_back(d);
            std::stable_sort(insertions.begin(), insertions.end(), [&](std::size_t a, std::size_t b) {
                return std::abs(g[a]) > std::abs(g[b]);
            });

            std::vector<std::size_t> cand_sup(k);
            std::vector<double> cand_s(k);
            std::vector<std::size_t> best_sup;
            std::vector<double> best_s;
            double best_f = f_cur;

            for (std::size_t ri = 0; ri < removals.size() && !improving; ++ri) {
                for (std::size_t ii = 0; ii < insertions.size(); ++ii) {
                    if (swaps >= config.max_total_swaps) return finish(swaps);
                    ++swaps;

                    std::size_t rm = removals[ri], ins = insertions[ii];
                    cand_sup.clear();
                    cand_s.clear();
                    for (std::size_t j = 0; j < k; ++j) {
                        if (j == rm) continue;
                        cand_sup.push_back(support[j]);
                        cand_s.push_back(s_sup[j]);
                    }
                    cand_sup.push_back(ins);
                    cand_s.push_back(0.0);
                    // keep support sorted (insert moved into place)
                    for (std::size_t j = cand_sup.size(); j-- > 1;) {
                        if (cand_sup[j - 1] <= cand_sup[j]) break;
                        std::swap(cand_sup[j - 1], cand_sup[j]);
                        std::swap(cand_s[j - 1], cand_s[j]);
                    }

                    double f2 = ws.run(cand_sup, cand_s, config.max_dgn_iterations);
                    record_best(cand_sup, cand_s, f2);
                    if (f2 < best_f) {
                        best_f = f2;
                        best_sup = cand_sup;
                        best_s = cand_s;
                        if (config.swap_strategy == SwapStrategy::ordered) {
                            improving = true;
                            break;
                        }
                    }
                }
            }
            if (best_f < f_cur) {
                support = std::move(best_sup);
                s_sup = std::move(best_s);
                f_cur = best_f;
                improving = true;
                if (f_cur < config.objective_threshold) return finish(swaps);
            }
        }
        if (swaps >= config.max_total_swaps) return finish(swaps);
    }
}

/// Squared magnitude of the P-point DFT of x zero-padded to length P.
inline std::vector<double> ps_measure(const Signal& x, std::size_t P) {
    if (P < x.size())
        throw validation_error("ps_measure: oversampled length P=" + std::to_string(P) +
                               " must be >= N=" + std::to_string(x.size()));
    Twiddles tw(P);
    std::vector<double> y(P);
    for (std::size_t p = 0; p < P; ++p) {
        cplx acc = 0.0;
        for (std::size_t n = 0; n < x.size(); ++n) acc += x[n] * tw.w[(p * n) % P];
        y[p] = std::norm(acc);
    }
    return y;
}

/// Rows are the P-point DFT functionals composed with the dictionary, so
/// |row_p . s|^2 reproduces ps_measure(D s, P).
inline MeasurementOperator power_spectrum_operator(const Dictionary& dict, std::size_t P) {
    if (P < dict.rows)
        throw validation_error("power_spectrum_operator: P must be >= N");
    Twiddles tw(P);
    MeasurementOperator op{P, dict.cols, std::vector<cplx>(P * dict.cols, 0.0)};
    for (std::size_t p = 0; p < P; ++p) {
        cplx* row = op.rows.data() + p * op.D;
        for (std::size_t n = 0; n < dict.rows; ++n) {
            cplx w = tw.w[(p * n) % P];
            const cplx* dict_row = dict.data.data() + n;
            for (std::size_t d = 0; d < op.D; ++d) row[d] += w * dict_row[d * dict.rows];
        }
    }
    return op;
}

/// Complex STFT spectrum of x zero-padded to length P (used by the noisy
/// measurement models that perturb the spectrum before taking magnitudes).
inline std::vector<cplx> ps_spectrum(const Signal& x, std::size_t P) {
    if (P < x.size()) throw validation_error("ps_spectrum: P must be >= N");
    Twiddles tw(P);
    std::vector<cplx> s(P);
    for (std::size_t p = 0; p < P; ++p) {
        cplx acc = 0.0;
        for (std::size_t n = 0; n < x.size(); ++n) acc += x[n] * tw.w[(p * n) % P];
        s[p] = acc;
    }
    return s;
}

}  // namespace stftpr
