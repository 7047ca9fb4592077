#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "locolasso/core.hpp"

namespace locolasso {

enum class KnnWeight {
    binary,    // S_ij = 1 for neighbors
    gaussian,  // S_ij = exp(-|x_i - x_j|^2 / 2) for neighbors
};

/// Directed k-nearest-neighbor lists under Euclidean distance. Column i of
/// X is sample i. Ties are broken toward the lower sample index.
inline std::vector<std::vector<Index>> knn_lists(const Matrix& X, Index k) {
    const Index n = X.cols();
    if (k < 1 || k >= n) {
        throw InputError(InputError::Kind::invalid_value, "",
                         "k must satisfy 1 <= k < n (k=" + std::to_string(k) +
                             ", n=" + std::to_string(n) + ")");
    }
    if (!X.allFinite()) {
        throw InputError(InputError::Kind::invalid_value, "", "non-finite sample");
    }
    std::vector<std::vector<Index>> lists(static_cast<std::size_t>(n));
    std::vector<Index> order(static_cast<std::size_t>(n - 1));
    Vector dist(n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) dist(j) = (X.col(i) - X.col(j)).squaredNorm();
        Index p = 0;
        for (Index j = 0; j < n; ++j) {
            if (j != i) order[static_cast<std::size_t>(p++)] = j;
        }
        std::partial_sort(order.begin(), order.begin() + k, order.end(),
                          [&](Index a, Index b) {
                              return dist(a) < dist(b) || (dist(a) == dist(b) && a < b);
                          });
        lists[static_cast<std::size_t>(i)].assign(order.begin(), order.begin() + k);
    }
    return lists;
}

/// Symmetrized k-NN graph R = (S^T + S) / 2. Binary mode keeps the 0.5
/// weights of one-directional neighbor relations.
inline SampleGraph build_knn_graph(const Matrix& X, Index k,
                                   KnnWeight mode = KnnWeight::binary) {
    const Index n = X.cols();
    auto lists = knn_lists(X, k);
    Matrix S = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j : lists[static_cast<std::size_t>(i)]) {
            S(i, j) = mode == KnnWeight::binary
                          ? 1.0
                          : std::exp(-0.5 * (X.col(i) - X.col(j)).squaredNorm());
        }
    }
    std::vector<Edge> edges;
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            double r = 0.5 * (S(i, j) + S(j, i));
            if (r > 0.0) edges.push_back({i, j, r});
        }
    }
    return SampleGraph::from_edges(n, edges);
}

}  // namespace locolasso
