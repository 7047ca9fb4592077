#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "locolasso/error.hpp"

namespace locolasso {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// n x d matrix of local models; row i is w_i. Column-major storage makes
/// W.data() exactly the stacked vector (W_11, W_21, ..., W_n1, ..., W_nd).
using WeightMatrix = Matrix;

/// Training data. X is d x n with one sample per column.
class Dataset {
public:
    Dataset() = default;

    Dataset(Matrix X, Vector y, bool bias_augmented = false)
        : X_(std::move(X)), y_(std::move(y)), bias_(bias_augmented) {
        if (y_.size() != X_.cols()) {
            throw InputError(InputError::Kind::dimension_mismatch, "",
                             "X has " + std::to_string(X_.cols()) +
                                 " samples but y has " +
                                 std::to_string(y_.size()) + " values");
        }
        if (!X_.allFinite() || !y_.allFinite()) {
            throw InputError(InputError::Kind::invalid_value, "",
                             "dataset contains NaN or Inf");
        }
        if (bias_) {
            if (X_.rows() == 0 || !(X_.row(X_.rows() - 1).array() == 1.0).all()) {
                throw InputError(InputError::Kind::invalid_value, "",
                                 "bias-augmented dataset needs a final all-ones feature row");
            }
        }
    }

    /// Appends the all-ones feature row.
    static Dataset with_bias(const Matrix& X, Vector y) {
        Matrix Xb(X.rows() + 1, X.cols());
        Xb.topRows(X.rows()) = X;
        Xb.row(X.rows()).setOnes();
        return Dataset(std::move(Xb), std::move(y), true);
    }

    const Matrix& X() const noexcept { return X_; }
    const Vector& y() const noexcept { return y_; }
    bool bias_augmented() const noexcept { return bias_; }

    Index n() const noexcept { return X_.cols(); }
    Index d() const noexcept { return X_.rows(); }

    /// Number of leading features under the exclusive penalty. The bias
    /// coefficient is fused by the network term but never sparsified.
    Index exclusive_features() const noexcept { return bias_ ? d() - 1 : d(); }

    /// Rows of X without the bias row.
    Matrix raw_features() const { return X_.topRows(exclusive_features()); }

    Dataset subset(std::span<const Index> samples) const {
        Matrix Xs(d(), static_cast<Index>(samples.size()));
        Vector ys(static_cast<Index>(samples.size()));
        for (std::size_t k = 0; k < samples.size(); ++k) {
            Xs.col(static_cast<Index>(k)) = X_.col(samples[k]);
            ys(static_cast<Index>(k)) = y_(samples[k]);
        }
        return Dataset(std::move(Xs), std::move(ys), bias_);
    }

private:
    Matrix X_;
    Vector y_;
    bool bias_ = false;
};

struct Edge {
    Index i;  // 0-based, i < j
    Index j;
    double weight;
};

/// Symmetric nonnegative relatedness graph over n samples with zero
/// diagonal. Only the upper triangle (i < j) is stored.
class SampleGraph {
public:
    SampleGraph() = default;
    explicit SampleGraph(Index n) : n_(n) {
        if (n < 0) {
            throw InputError(InputError::Kind::invalid_value, "", "negative sample count");
        }
    }

    /// Builds from 0-based (i, j, w) triples in any orientation. A pair given
    /// twice must carry the same weight both times.
    static SampleGraph from_edges(Index n, std::span<const Edge> edges) {
        SampleGraph g(n);
        std::map<std::pair<Index, Index>, double> seen;
        for (const auto& e : edges) {
            if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n) {
                throw InputError(InputError::Kind::out_of_range, "",
                                 "edge (" + std::to_string(e.i + 1) + "," +
                                     std::to_string(e.j + 1) + ") outside 1.." +
                                     std::to_string(n));
            }
            if (e.i == e.j) {
                throw InputError(InputError::Kind::invalid_value, "",
                                 "self-loop on sample " + std::to_string(e.i + 1));
            }
            if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) {
                throw InputError(InputError::Kind::invalid_value, "",
                                 "edge weights must be finite and nonnegative");
            }
            auto key = std::minmax(e.i, e.j);
            auto [it, inserted] = seen.emplace(key, e.weight);
            if (!inserted && it->second != e.weight) {
                throw InputError(InputError::Kind::invalid_value, "",
                                 "conflicting weights for pair (" +
                                     std::to_string(key.first + 1) + "," +
                                     std::to_string(key.second + 1) + ")");
            }
        }
        for (const auto& [key, w] : seen) {
            if (w > 0.0) g.edges_.push_back({key.first, key.second, w});
        }
        return g;
    }

    /// Upper triangle of a symmetric matrix; asymmetry or diagonal mass is an error.
    static SampleGraph from_dense(const Matrix& R) {
        if (R.rows() != R.cols()) {
            throw InputError(InputError::Kind::dimension_mismatch, "", "R must be square");
        }
        std::vector<Edge> edges;
        for (Index i = 0; i < R.rows(); ++i) {
            if (R(i, i) != 0.0) {
                throw InputError(InputError::Kind::invalid_value, "", "R has nonzero diagonal");
            }
            for (Index j = i + 1; j < R.cols(); ++j) {
                if (R(i, j) != R(j, i)) {
                    throw InputError(InputError::Kind::invalid_value, "", "R is not symmetric");
                }
                if (R(i, j) != 0.0) edges.push_back({i, j, R(i, j)});
            }
        }
        return from_edges(R.rows(), edges);
    }

    Index n() const noexcept { return n_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    bool empty() const noexcept { return edges_.empty(); }

    double weight(Index i, Index j) const {
        if (i == j) return 0.0;
        auto [a, b] = std::minmax(i, j);
        for (const auto& e : edges_) {
            if (e.i == a && e.j == b) return e.weight;
        }
        return 0.0;
    }

    Matrix dense() const {
        Matrix R = Matrix::Zero(n_, n_);
        for (const auto& e : edges_) {
            R(e.i, e.j) = e.weight;
            R(e.j, e.i) = e.weight;
        }
        return R;
    }

    /// Weighted graph Laplacian diag(R 1) - R.
    Matrix laplacian() const {
        Matrix L = Matrix::Zero(n_, n_);
        for (const auto& e : edges_) {
            L(e.i, e.j) -= e.weight;
            L(e.j, e.i) -= e.weight;
            L(e.i, e.i) += e.weight;
            L(e.j, e.j) += e.weight;
        }
        return L;
    }

    /// Subgraph on the listed samples, renumbered in list order.
    SampleGraph induced(std::span<const Index> samples) const {
        std::vector<Index> remap(static_cast<std::size_t>(n_), -1);
        for (std::size_t k = 0; k < samples.size(); ++k) {
            remap[static_cast<std::size_t>(samples[k])] = static_cast<Index>(k);
        }
        std::vector<Edge> kept;
        for (const auto& e : edges_) {
            Index a = remap[static_cast<std::size_t>(e.i)];
            Index b = remap[static_cast<std::size_t>(e.j)];
            if (a >= 0 && b >= 0) kept.push_back({a, b, e.weight});
        }
        return from_edges(static_cast<Index>(samples.size()), kept);
    }

private:
    Index n_ = 0;
    std::vector<Edge> edges_;
};

/// Column-stacking layout of an n x d weight matrix, 1-based as in the
/// usual vec() convention: entry (i, j) sits at position (j - 1) n + i.
class VecLayout {
public:
    VecLayout(Index n, Index d) : n_(n), d_(d) {
        if (n <= 0 || d <= 0) {
            throw InputError(InputError::Kind::invalid_value, "", "layout needs n, d > 0");
        }
    }

    Index n() const noexcept { return n_; }
    Index d() const noexcept { return d_; }
    Index size() const noexcept { return n_ * d_; }

    Index index(Index sample, Index feature) const {
        if (sample < 1 || sample > n_ || feature < 1 || feature > d_) {
            throw InputError(InputError::Kind::out_of_range, "",
                             "vec index (" + std::to_string(sample) + "," +
                                 std::to_string(feature) + ") outside " +
                                 std::to_string(n_) + "x" + std::to_string(d_));
        }
        return (feature - 1) * n_ + sample;
    }

    /// Inverse of index(): returns (sample, feature).
    std::pair<Index, Index> position(Index l) const {
        if (l < 1 || l > size()) {
            throw InputError(InputError::Kind::out_of_range, "",
                             "vec position " + std::to_string(l) + " outside 1.." +
                                 std::to_string(size()));
        }
        return {(l - 1) % n_ + 1, (l - 1) / n_ + 1};
    }

    /// Group indicator: 1 iff position l holds a coefficient of sample i.
    bool in_group(Index sample, Index l) const { return position(l).first == sample; }

private:
    Index n_;
    Index d_;
};

inline Vector vec(const WeightMatrix& W) {
    return Eigen::Map<const Vector>(W.data(), W.size());
}

inline WeightMatrix unvec(const Vector& v, Index n, Index d) {
    return Eigen::Map<const Matrix>(v.data(), n, d);
}

struct Hyperparams {
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    double epsilon = 1e-8;
    std::size_t max_iter = 100;
    double tol = 1e-6;

    void validate() const {
        if (!(lambda1 >= 0.0) || !std::isfinite(lambda1)) {
            throw ConfigError("lambda1 must be finite and >= 0");
        }
        if (!(lambda2 >= 0.0) || !std::isfinite(lambda2)) {
            throw ConfigError("lambda2 must be finite and >= 0");
        }
        if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
            throw ConfigError("epsilon must be > 0");
        }
        if (!(tol > 0.0)) throw ConfigError("tol must be > 0");
        if (max_iter == 0) throw ConfigError("max_iter must be >= 1");
    }

    bool operator==(const Hyperparams&) const = default;
};

}  // namespace locolasso
