#pragma once

// Independent reference computations for the test suites. Nothing here may
// call the solver, regularizer or clustering code it is used to check.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Z = [diag(u_1) | ... | diag(u_d)] for X = [u_1, ..., u_d]^T (d x n).
inline Matrix design_Z(const Matrix& X) {
    const Index d = X.rows(), n = X.cols();
    Matrix Z = Matrix::Zero(n, d * n);
    for (Index j = 0; j < d; ++j) {
        for (Index i = 0; i < n; ++i) Z(i, j * n + i) = X(j, i);
    }
    return Z;
}

/// Column-stacked vec(W) built element by element.
inline Vector stack(const Matrix& W) {
    Vector v(W.size());
    Index l = 0;
    for (Index j = 0; j < W.cols(); ++j) {
        for (Index i = 0; i < W.rows(); ++i) v(l++) = W(i, j);
    }
    return v;
}

inline Matrix unstack(const Vector& v, Index n, Index d) {
    Matrix W(n, d);
    Index l = 0;
    for (Index j = 0; j < d; ++j) {
        for (Index i = 0; i < n; ++i) W(i, j) = v(l++);
    }
    return W;
}

/// Double-sum network penalty over a dense relatedness matrix.
inline double network(const Matrix& W, const Matrix& R, double eps) {
    double total = 0.0;
    for (Index i = 0; i < W.rows(); ++i) {
        for (Index j = 0; j < W.rows(); ++j) {
            double sq = 0.0;
            for (Index k = 0; k < W.cols(); ++k) sq += (W(i, k) - W(j, k)) * (W(i, k) - W(j, k));
            total += R(i, j) * std::sqrt(sq + eps * eps);
        }
    }
    return total;
}

inline double exclusive(const Matrix& W, double eps, Index cols) {
    double total = 0.0;
    for (Index i = 0; i < W.rows(); ++i) {
        double l1 = 0.0;
        for (Index j = 0; j < cols; ++j) l1 += std::sqrt(W(i, j) * W(i, j) + eps * eps);
        total += l1 * l1;
    }
    return total;
}

/// |y - Z vec(W)|^2 + l1 * network + l2 * exclusive, with Z materialized.
inline double objective(const Matrix& W, const Matrix& X, const Vector& y, const Matrix& R,
                        double l1, double l2, double eps, Index exclusive_cols) {
    const Vector r = y - design_Z(X) * stack(W);
    return r.squaredNorm() + l1 * network(W, R, eps) + l2 * exclusive(W, eps, exclusive_cols);
}

/// C entry by entry from a dense R: -r_ij / s_ij off the diagonal, row sums on it.
inline Matrix network_C(const Matrix& W, const Matrix& R, double eps) {
    const Index n = W.rows();
    Matrix C = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const double dist = std::sqrt((W.row(i) - W.row(j)).squaredNorm() + eps * eps);
            C(i, j) = -R(i, j) / dist;
            C(i, i) += R(i, j) / dist;
        }
    }
    return C;
}

/// Dense stationarity solve (Z^T Z + l1 I (x) C + l2 diag(fe))^-1 Z^T y.
inline Matrix stationarity_solve(const Matrix& X, const Vector& y, const Matrix& C,
                                 const Vector& fe_diag, double l1, double l2) {
    const Index d = X.rows(), n = X.cols();
    const Matrix Z = design_Z(X);
    Matrix A = Z.transpose() * Z;
    for (Index j = 0; j < d; ++j) A.block(j * n, j * n, n, n) += l1 * C;
    A.diagonal() += l2 * fe_diag;
    const Vector v = A.colPivHouseholderQr().solve(Z.transpose() * y);
    return unstack(v, n, d);
}

/// Central finite-difference gradient.
inline Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                          double h = 1e-6) {
    Vector g(x.size());
    Vector xp = x, xm = x;
    for (Index k = 0; k < x.size(); ++k) {
        xp(k) = x(k) + h;
        xm(k) = x(k) - h;
        g(k) = (f(xp) - f(xm)) / (2.0 * h);
        xp(k) = xm(k) = x(k);
    }
    return g;
}

/// ARI from explicit enumeration of all sample pairs.
inline double ari_pairs(const std::vector<int>& a, const std::vector<int>& b) {
    double ss = 0, sd = 0, ds = 0, dd = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            const bool sa = a[i] == a[j], sb = b[i] == b[j];
            if (sa && sb) ++ss;
            else if (sa) ++sd;
            else if (sb) ++ds;
            else ++dd;
        }
    }
    const double denom = (ss + sd) * (sd + dd) + (ss + ds) * (ds + dd);
    if (denom == 0.0) return 1.0;
    return 2.0 * (ss * dd - sd * ds) / denom;
}

/// Weighted sum of Euclidean distances minimized by grid search on the
/// anchors' bounding box, then repeated local grid refinement.
inline double weber_grid(const Matrix& anchors, const Vector& r, Vector* argmin = nullptr) {
    auto cost = [&](double x, double y) {
        double c = 0.0;
        for (Index i = 0; i < anchors.rows(); ++i) {
            c += r(i) * std::hypot(x - anchors(i, 0), y - anchors(i, 1));
        }
        return c;
    };
    double lo_x = anchors.col(0).minCoeff(), hi_x = anchors.col(0).maxCoeff();
    double lo_y = anchors.col(1).minCoeff(), hi_y = anchors.col(1).maxCoeff();
    double bx = lo_x, by = lo_y, best = cost(bx, by);
    constexpr int steps = 200;
    double hx = (hi_x - lo_x) / steps, hy = (hi_y - lo_y) / steps;
    for (int round = 0; round < 30; ++round) {
        const double cx = bx, cy = by;
        const double x0 = round == 0 ? lo_x : cx - steps / 2 * hx;
        const double y0 = round == 0 ? lo_y : cy - steps / 2 * hy;
        for (int a = 0; a <= steps; ++a) {
            for (int b = 0; b <= steps; ++b) {
                const double x = x0 + a * hx, y = y0 + b * hy;
                const double c = cost(x, y);
                if (c < best) {
                    best = c;
                    bx = x;
                    by = y;
                }
            }
        }
        hx *= 0.1;
        hy *= 0.1;
    }
    if (argmin) *argmin = Vector(Eigen::Vector2d(bx, by));
    return best;
}

}  // namespace oracle
