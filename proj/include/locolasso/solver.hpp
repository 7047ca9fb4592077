#pragma once

// Iterative least squares for the localized Lasso.
//
// Each step minimizes the quadratic surrogate
//     |y - Z vec(W)|^2 + vec(W)^T H vec(W),   H = l1 (I_d (x) C) + l2 F_e,
// where Z = [diag(u_1) | ... | diag(u_d)] and u_j is feature j across samples.
// H splits into d independent n x n blocks H_j = l1 C + l2 diag(F_e[:, j]).
// Features whose block is positive definite (exclusive penalty active) go
// through the Woodbury form
//     vec(W_A) = H_A^-1 Z_A^T (I + Z_A H_A^-1 Z_A^T)^-1 (y - Z_B vec(W_B)).
// The remaining features B (the bias column, or every feature when l2 = 0)
// have singular blocks l1 C and are solved from the reduced system
//     (Z_B^T M^-1 Z_B + l1 I (x) C) vec(W_B) = Z_B^T M^-1 y,
//     M = I + Z_A H_A^-1 Z_A^T.
// Z is never materialized.

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "locolasso/core.hpp"
#include "locolasso/parallel.hpp"
#include "locolasso/regularizers.hpp"

namespace locolasso {

struct SolverState {
    WeightMatrix W;  // current iterate W^(t); empty before the first update
    std::size_t t = 0;
    std::vector<double> objective_trace;
    NetworkMatrixC C;
    ExclusiveDiagonal Fe;
};

struct FitResult {
    WeightMatrix W;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<double> objective_trace;
    Hyperparams hyper;
    bool bias_augmented = false;

    double final_objective() const {
        return objective_trace.empty() ? std::numeric_limits<double>::quiet_NaN()
                                       : objective_trace.back();
    }
};

struct FitOptions {
    /// Stop once the relative objective change drops below tol. Disabled for
    /// fixed-iteration timing runs.
    bool early_stop = true;
    std::size_t threads = 0;  // 0: thread_count()
    /// Called after each update with the previous and new iterate. The
    /// previous iterate is empty on the first call.
    std::function<void(const WeightMatrix& prev, const WeightMatrix& next)> on_step;
};

/// Slack allowed when comparing consecutive objective values.
inline double descent_slack(double j) { return 1e-9 * (1.0 + std::abs(j)); }

inline double relative_change(double before, double after) {
    return std::abs(before - after) / (1.0 + std::abs(before));
}

namespace detail {

inline void require_regularized(const Hyperparams& hp) {
    if (hp.lambda1 == 0.0 && hp.lambda2 == 0.0) {
        throw ConfigError(
            "lambda1 and lambda2 are both zero: the per-sample problem is underdetermined");
    }
}

inline Matrix block(const NetworkMatrixC& C, const ExclusiveDiagonal& Fe, Index j,
                    const Hyperparams& hp) {
    Matrix H = hp.lambda1 * C.C;
    H.diagonal() += hp.lambda2 * Fe.entries.col(j);
    return H;
}

}  // namespace detail

/// Exact minimizer of the quadratic surrogate built from state.C and state.Fe.
inline WeightMatrix ils_update(const SolverState& state, const Dataset& data,
                               const SampleGraph& G, const Hyperparams& hp,
                               std::size_t threads = 0) {
    detail::require_regularized(hp);
    const Index n = data.n();
    const Index d = data.d();
    if (G.n() != n || state.C.C.rows() != n || state.Fe.entries.rows() != n ||
        state.Fe.entries.cols() != d) {
        throw InputError(InputError::Kind::dimension_mismatch, "",
                         "solver state does not match the dataset");
    }
    const Matrix& X = data.X();
    const Vector& y = data.y();
    const Index p = data.exclusive_features();

    std::vector<Index> woodbury;
    std::vector<Index> reduced;
    for (Index j = 0; j < d; ++j) {
        (hp.lambda2 > 0.0 && j < p ? woodbury : reduced).push_back(j);
    }
    const std::size_t workers = threads ? threads : thread_count();

    // M = I + sum_j diag(u_j) H_j^-1 diag(u_j), accumulated per worker.
    std::vector<Matrix> partial(std::min<std::size_t>(workers, std::max<std::size_t>(1, woodbury.size())),
                                Matrix::Zero(n, n));
    parallel_chunks(woodbury.size(), partial.size(),
                    [&](std::size_t w, std::size_t begin, std::size_t end) {
                        for (std::size_t k = begin; k < end; ++k) {
                            const Index j = woodbury[k];
                            Eigen::LLT<Matrix> llt(detail::block(state.C, state.Fe, j, hp));
                            if (llt.info() != Eigen::Success) {
                                throw SolverError("block for feature " + std::to_string(j + 1) +
                                                      " is not positive definite",
                                                  state.t);
                            }
                            Matrix B = X.row(j).transpose().asDiagonal();
                            llt.matrixL().solveInPlace(B);
                            partial[w].selfadjointView<Eigen::Lower>().rankUpdate(B.transpose());
                        }
                    });
    Matrix M = Matrix::Identity(n, n);
    for (const auto& part : partial) M += part;
    const Matrix M_full = M.selfadjointView<Eigen::Lower>();
    Eigen::LLT<Matrix> m_llt(M_full);
    if (m_llt.info() != Eigen::Success) {
        throw SolverError("I + Z H^-1 Z^T is not positive definite", state.t);
    }

    WeightMatrix W(n, d);
    Vector rhs = y;
    if (!reduced.empty()) {
        const Index nb = static_cast<Index>(reduced.size());
        Matrix Minv_U(n, nb * n);  // M^-1 diag(u_b) for each reduced feature
        for (Index b = 0; b < nb; ++b) {
            Minv_U.middleCols(b * n, n) = m_llt.solve(Matrix(X.row(reduced[b]).transpose().asDiagonal()));
        }
        const Vector Minv_y = m_llt.solve(y);
        Matrix K(nb * n, nb * n);
        Vector k_rhs(nb * n);
        for (Index a = 0; a < nb; ++a) {
            const auto ua = X.row(reduced[a]).transpose();
            for (Index b = 0; b < nb; ++b) {
                K.block(a * n, b * n, n, n) = ua.asDiagonal() * Minv_U.middleCols(b * n, n);
            }
            K.block(a * n, a * n, n, n) += hp.lambda1 * state.C.C;
            k_rhs.segment(a * n, n) = ua.cwiseProduct(Minv_y);
        }
        K = 0.5 * (K + K.transpose());
        // K is only semidefinite when a graph component has fewer samples than
        // reduced features; LDLT then drops the null pivots and returns one of
        // the (equally optimal) surrogate minimizers.
        Eigen::LDLT<Matrix> ldlt(K);
        Vector sol = ldlt.solve(k_rhs);
        for (int refine = 0; refine < 2; ++refine) sol += ldlt.solve(k_rhs - K * sol);
        if (!sol.allFinite()) throw SolverError("reduced system is singular", state.t);
        for (Index b = 0; b < nb; ++b) {
            W.col(reduced[b]) = sol.segment(b * n, n);
            rhs -= X.row(reduced[b]).transpose().cwiseProduct(W.col(reduced[b]));
        }
    }

    if (!woodbury.empty()) {
        const Vector alpha = m_llt.solve(rhs);
        parallel_chunks(woodbury.size(), workers,
                        [&](std::size_t, std::size_t begin, std::size_t end) {
                            for (std::size_t k = begin; k < end; ++k) {
                                const Index j = woodbury[k];
                                Eigen::LLT<Matrix> llt(detail::block(state.C, state.Fe, j, hp));
                                W.col(j) = llt.solve(X.row(j).transpose().cwiseProduct(alpha));
                            }
                        });
    }
    return W;
}

/// Identity-design update: per feature, (I + l1 C + l2 diag(F_e[:, j])) w_j = targets[:, j].
inline WeightMatrix identity_update(const SolverState& state, const Matrix& targets,
                                    const Hyperparams& hp, std::size_t threads = 0) {
    const Index n = targets.rows();
    WeightMatrix W(n, targets.cols());
    parallel_chunks(static_cast<std::size_t>(targets.cols()), threads ? threads : thread_count(),
                    [&](std::size_t, std::size_t begin, std::size_t end) {
                        for (auto j = static_cast<Index>(begin); j < static_cast<Index>(end); ++j) {
                            Matrix A = detail::block(state.C, state.Fe, j, hp);
                            A.diagonal().array() += 1.0;
                            Eigen::LLT<Matrix> llt(A);
                            if (llt.info() != Eigen::Success) {
                                throw SolverError("identity-design block for feature " +
                                                      std::to_string(j + 1) +
                                                      " is not positive definite",
                                                  state.t);
                            }
                            W.col(j) = llt.solve(targets.col(j));
                        }
                    });
    return W;
}

namespace detail {

/// Shared reweighting loop. `update` maps a state to the next iterate,
/// `evaluate` gives the objective of an iterate.
template <typename Update, typename Evaluate>
FitResult run_ils(SolverState state, const SampleGraph& G, const Hyperparams& hp,
                  Index exclusive_cols, const FitOptions& opts, Update&& update,
                  Evaluate&& evaluate) {
    FitResult result;
    result.hyper = hp;
    WeightMatrix best;
    double best_j = std::numeric_limits<double>::infinity();

    for (std::size_t it = 0; it < hp.max_iter; ++it) {
        WeightMatrix next = update(state);
        const double j = evaluate(next);
        if (!std::isfinite(j) || !next.allFinite()) {
            throw SolverError("objective became non-finite", state.t, state.objective_trace);
        }
        if (opts.on_step) opts.on_step(state.W, next);

        const bool has_prev = !state.objective_trace.empty();
        const double prev_j = has_prev ? state.objective_trace.back() : 0.0;
        state.objective_trace.push_back(j);
        if (j < best_j) {
            best_j = j;
            best = next;
        }

        state.C = build_C(next, G, hp.epsilon);
        state.Fe = build_Fe(next, hp.epsilon, exclusive_cols);
        state.W = std::move(next);
        ++state.t;

        if (opts.early_stop && has_prev && relative_change(prev_j, j) < hp.tol) {
            result.converged = true;
            break;
        }
    }
    result.iterations = state.t;
    result.objective_trace = std::move(state.objective_trace);
    // A final iterate above an earlier one (numerical noise past the slack)
    // is never returned.
    result.W = best_j + descent_slack(best_j) < result.objective_trace.back() ? std::move(best)
                                                                              : std::move(state.W);
    return result;
}

}  // namespace detail

/// Fits one sparse linear model per training sample.
inline FitResult fit(const Dataset& data, const SampleGraph& G, const Hyperparams& hp,
                     const FitOptions& opts = {}) {
    hp.validate();
    detail::require_regularized(hp);
    if (G.n() != data.n()) {
        throw InputError(InputError::Kind::dimension_mismatch, "",
                         "graph has " + std::to_string(G.n()) + " samples, dataset has " +
                             std::to_string(data.n()));
    }
    const Index p = data.exclusive_features();
    SolverState state;
    state.C = initial_C(G);
    state.Fe = initial_Fe(data.n(), data.d(), p);
    FitResult r = detail::run_ils(
        std::move(state), G, hp, p, opts,
        [&](const SolverState& s) { return ils_update(s, data, G, hp, opts.threads); },
        [&](const WeightMatrix& W) { return objective(W, data, G, hp); });
    r.bias_augmented = data.bias_augmented();
    return r;
}

/// Same reweighting scheme with loss |targets - W|_F^2 (targets is n x d).
/// lambda1 = lambda2 = 0 is allowed and returns the targets.
inline FitResult fit_identity(const Matrix& targets, const SampleGraph& G, const Hyperparams& hp,
                              const FitOptions& opts = {}) {
    hp.validate();
    if (G.n() != targets.rows()) {
        throw InputError(InputError::Kind::dimension_mismatch, "",
                         "graph size does not match the number of samples");
    }
    SolverState state;
    state.C = initial_C(G);
    state.Fe = initial_Fe(targets.rows(), targets.cols());
    return detail::run_ils(
        std::move(state), G, hp, targets.cols(), opts,
        [&](const SolverState& s) { return identity_update(s, targets, hp, opts.threads); },
        [&](const WeightMatrix& W) { return identity_objective(W, targets, G, hp); });
}

/// Signed majorization gaps between two consecutive iterates, all with the
/// same eps smoothing as the solver. For pairs produced by an update each
/// is <= 0 up to rounding.
struct AuditRecord {
    double delta_g = 0.0;  // network: [P_g - q_g](next) - [P_g - q_g](prev)
    double delta_e = 0.0;  // exclusive: [P_e - q_e](next) - [P_e - q_e](prev)
    double delta = 0.0;    // [J(next) - J(prev)] - [J~(next) - J~(prev)] = l1 delta_g + l2 delta_e
};

/// q_g and q_e are the reweighted quadratics built at W_prev. Everything is
/// evaluated pair by pair and sample by sample: the matrix form tr(W^T C W)
/// cancels badly once rows fuse and C carries 1/eps-sized weights.
inline AuditRecord majorization_audit(const WeightMatrix& W_next, const WeightMatrix& W_prev,
                                      const SampleGraph& G, const Hyperparams& hp,
                                      Index exclusive_cols = -1) {
    if (W_next.rows() != W_prev.rows() || W_next.cols() != W_prev.cols() ||
        W_prev.rows() != G.n()) {
        throw InputError(InputError::Kind::dimension_mismatch, "", "iterates differ in shape");
    }
    const double eps = hp.epsilon;
    const Index p = exclusive_cols < 0 ? W_prev.cols() : exclusive_cols;
    AuditRecord rec;

    // Per ordered pair: s - q / (2 s_prev), s the smoothed and q the squared distance.
    for (const auto& e : G.edges()) {
        const double q_next = (W_next.row(e.i) - W_next.row(e.j)).squaredNorm();
        const double q_prev = (W_prev.row(e.i) - W_prev.row(e.j)).squaredNorm();
        const double s_prev = std::sqrt(q_prev + eps * eps);
        const double s_next = std::sqrt(q_next + eps * eps);
        rec.delta_g += 2.0 * e.weight *
                       ((s_next - q_next / (2.0 * s_prev)) - (s_prev - q_prev / (2.0 * s_prev)));
    }

    // Per sample: (sum_j a_j)^2 - (sum_j w_j^2 / a_j^prev) (sum_j a_j^prev).
    for (Index i = 0; i < W_prev.rows(); ++i) {
        double l1_next = 0.0, l1_prev = 0.0, ratio_next = 0.0, ratio_prev = 0.0;
        for (Index j = 0; j < p; ++j) {
            const double a_prev = smoothed_abs(W_prev(i, j), eps);
            l1_prev += a_prev;
            l1_next += smoothed_abs(W_next(i, j), eps);
            ratio_next += W_next(i, j) * W_next(i, j) / a_prev;
            ratio_prev += W_prev(i, j) * W_prev(i, j) / a_prev;
        }
        rec.delta_e += (l1_next * l1_next - ratio_next * l1_prev) -
                       (l1_prev * l1_prev - ratio_prev * l1_prev);
    }
    rec.delta = hp.lambda1 * rec.delta_g + hp.lambda2 * rec.delta_e;
    return rec;
}

}  // namespace locolasso
