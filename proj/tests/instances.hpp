#pragma once

// Random problem instances shared by the unit tests and the acceptance run.

#include <random>

#include "locolasso/core.hpp"
#include "locolasso/knn.hpp"

namespace testing_support {

using namespace locolasso;

struct Instance {
    Dataset data;
    SampleGraph graph;
};

inline Matrix uniform_matrix(std::mt19937_64& rng, Index rows, Index cols, double lo = -1.0,
                             double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    Matrix M(rows, cols);
    for (Index c = 0; c < cols; ++c) {
        for (Index r = 0; r < rows; ++r) M(r, c) = u(rng);
    }
    return M;
}

/// Random features in [-1, 1], targets from random local models plus noise,
/// binary k-NN graph.
inline Instance random_instance(std::uint64_t seed, Index n, Index d, Index k, bool bias = false) {
    std::mt19937_64 rng(seed);
    Matrix X = uniform_matrix(rng, d, n);
    const Matrix W = uniform_matrix(rng, n, d, -2.0, 2.0);
    Vector y = (W.array() * X.transpose().array()).rowwise().sum();
    std::normal_distribution<double> noise(0.0, 0.1);
    for (Index i = 0; i < n; ++i) y(i) += noise(rng);
    SampleGraph G = build_knn_graph(X, k);
    return {bias ? Dataset::with_bias(X, y) : Dataset(X, y), std::move(G)};
}

/// k-NN graph plus a chain through all samples, so the graph is connected.
inline SampleGraph connected_graph(const Matrix& X, Index k) {
    Matrix R = build_knn_graph(X, k).dense();
    for (Index i = 0; i + 1 < R.rows(); ++i) {
        if (R(i, i + 1) == 0.0) R(i, i + 1) = R(i + 1, i) = 0.25;
    }
    return SampleGraph::from_dense(R);
}

}  // namespace testing_support
