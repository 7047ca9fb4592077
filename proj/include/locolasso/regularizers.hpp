#pragma once

// Composite penalty and the reweighting operators of the iterative
// least-squares scheme.
//
// Both norms are smoothed with s(x) = sqrt(x^2 + eps^2): the network term
// uses sqrt(|w_i - w_j|^2 + eps^2) per ordered pair and the exclusive term
// uses (sum_j sqrt(W_ij^2 + eps^2))^2 per sample. With this choice the
// reweighted quadratics are exact tangent majorizers of the smoothed
// penalties, and the gradients are exactly 2 C W and 2 F_e * W.

#include <cmath>

#include "locolasso/core.hpp"

namespace locolasso {

inline double smoothed_abs(double x, double eps) { return std::sqrt(x * x + eps * eps); }

/// Sum over ordered pairs (i, j) of r_ij sqrt(|w_i - w_j|^2 + eps^2); each
/// stored edge counts twice. Returned without lambda1.
inline double network_penalty(const WeightMatrix& W, const SampleGraph& G, double eps = 0.0) {
    if (W.rows() != G.n()) {
        throw InputError(InputError::Kind::dimension_mismatch, "",
                         "W has " + std::to_string(W.rows()) + " rows, graph has " +
                             std::to_string(G.n()) + " samples");
    }
    double total = 0.0;
    for (const auto& e : G.edges()) {
        double sq = (W.row(e.i) - W.row(e.j)).squaredNorm();
        total += 2.0 * e.weight * std::sqrt(sq + eps * eps);
    }
    return total;
}

/// Sum_i (sum_j s(W_ij))^2 over the first `exclusive_cols` features
/// (all features when negative). Returned without lambda2.
inline double exclusive_penalty(const WeightMatrix& W, double eps = 0.0,
                                Index exclusive_cols = -1) {
    const Index p = exclusive_cols < 0 ? W.cols() : exclusive_cols;
    double total = 0.0;
    for (Index i = 0; i < W.rows(); ++i) {
        double l1 = 0.0;
        for (Index j = 0; j < p; ++j) l1 += smoothed_abs(W(i, j), eps);
        total += l1 * l1;
    }
    return total;
}

/// Residuals y_i - w_i^T x_i.
inline Vector residuals(const WeightMatrix& W, const Dataset& data) {
    if (W.rows() != data.n() || W.cols() != data.d()) {
        throw InputError(InputError::Kind::dimension_mismatch, "",
                         "W is " + std::to_string(W.rows()) + "x" + std::to_string(W.cols()) +
                             ", dataset needs " + std::to_string(data.n()) + "x" +
                             std::to_string(data.d()));
    }
    // rowwise dot of W with X^T
    return data.y() - (W.array() * data.X().transpose().array()).rowwise().sum().matrix();
}

inline double squared_loss(const WeightMatrix& W, const Dataset& data) {
    return residuals(W, data).squaredNorm();
}

/// Full (smoothed) objective: squared loss + lambda1 network + lambda2 exclusive.
inline double objective(const WeightMatrix& W, const Dataset& data, const SampleGraph& G,
                        const Hyperparams& hp) {
    double j = squared_loss(W, data);
    if (hp.lambda1 != 0.0) j += hp.lambda1 * network_penalty(W, G, hp.epsilon);
    if (hp.lambda2 != 0.0) {
        j += hp.lambda2 * exclusive_penalty(W, hp.epsilon, data.exclusive_features());
    }
    return j;
}

/// Objective with identity design: |targets - W|_F^2 + penalties.
inline double identity_objective(const WeightMatrix& W, const Matrix& targets,
                                 const SampleGraph& G, const Hyperparams& hp) {
    double j = (targets - W).squaredNorm();
    if (hp.lambda1 != 0.0) j += hp.lambda1 * network_penalty(W, G, hp.epsilon);
    if (hp.lambda2 != 0.0) j += hp.lambda2 * exclusive_penalty(W, hp.epsilon);
    return j;
}

/// n x n network reweighting matrix; F_g = I_d (x) C is never formed.
struct NetworkMatrixC {
    Matrix C;

    /// (I_d (x) C) vec(W) in matrix form.
    Matrix apply(const WeightMatrix& W) const { return C * W; }

    /// vec(W)^T (I_d (x) C) vec(W) = tr(W^T C W).
    double quadratic(const WeightMatrix& W) const { return (W.array() * (C * W).array()).sum(); }
};

/// Off-diagonal -r_ij / s_ij with s_ij = sqrt(|w_i - w_j|^2 + eps^2);
/// each diagonal entry cancels its row.
inline NetworkMatrixC build_C(const WeightMatrix& W, const SampleGraph& G, double eps) {
    if (W.rows() != G.n()) {
        throw InputError(InputError::Kind::dimension_mismatch, "", "W rows != graph size");
    }
    const Index n = G.n();
    NetworkMatrixC out{Matrix::Zero(n, n)};
    for (const auto& e : G.edges()) {
        double dist = std::sqrt((W.row(e.i) - W.row(e.j)).squaredNorm() + eps * eps);
        double a = e.weight / dist;
        out.C(e.i, e.j) -= a;
        out.C(e.j, e.i) -= a;
        out.C(e.i, e.i) += a;
        out.C(e.j, e.j) += a;
    }
    return out;
}

/// Starting point: every pairwise distance taken as 1, i.e. the Laplacian of R.
inline NetworkMatrixC initial_C(const SampleGraph& G) { return {G.laplacian()}; }

/// Diagonal of F_e stored in W's shape; entries(i, j) is the diagonal element
/// at vec position (j - 1) n + i. Features outside the exclusive block hold 0.
struct ExclusiveDiagonal {
    Matrix entries;

    Vector diag() const { return vec(entries); }
    Matrix apply(const WeightMatrix& W) const { return entries.cwiseProduct(W); }
    double quadratic(const WeightMatrix& W) const {
        return (entries.array() * W.array().square()).sum();
    }
};

/// entries(i, j) = (sum_k s(W_ik)) / s(W_ij) with s(x) = sqrt(x^2 + eps^2).
inline ExclusiveDiagonal build_Fe(const WeightMatrix& W, double eps, Index exclusive_cols = -1) {
    const Index p = exclusive_cols < 0 ? W.cols() : exclusive_cols;
    ExclusiveDiagonal out{Matrix::Zero(W.rows(), W.cols())};
    for (Index i = 0; i < W.rows(); ++i) {
        double l1 = 0.0;
        for (Index j = 0; j < p; ++j) l1 += smoothed_abs(W(i, j), eps);
        for (Index j = 0; j < p; ++j) out.entries(i, j) = l1 / smoothed_abs(W(i, j), eps);
    }
    return out;
}

inline ExclusiveDiagonal initial_Fe(Index n, Index d, Index exclusive_cols = -1) {
    const Index p = exclusive_cols < 0 ? d : exclusive_cols;
    ExclusiveDiagonal out{Matrix::Zero(n, d)};
    out.entries.leftCols(p).setOnes();
    return out;
}

/// Quadratic surrogate |y - Z vec(W)|^2 + vec(W)^T (l1 F_g + l2 F_e) vec(W).
inline double surrogate_objective(const WeightMatrix& W, const Dataset& data,
                                  const NetworkMatrixC& C, const ExclusiveDiagonal& Fe,
                                  const Hyperparams& hp) {
    return squared_loss(W, data) + hp.lambda1 * C.quadratic(W) + hp.lambda2 * Fe.quadratic(W);
}

}  // namespace locolasso
