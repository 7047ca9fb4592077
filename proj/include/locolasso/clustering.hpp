#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <vector>

#include "locolasso/core.hpp"
#include "locolasso/knn.hpp"
#include "locolasso/solver.hpp"

namespace locolasso {

struct ClusterAssignment {
    std::vector<int> labels;  // values in 1..K
    int K = 0;
};

/// Sparse convex clustering of the columns of X (d x n): min |X^T - W|_F^2
/// + penalties, over a Gaussian-weighted k-NN graph.
inline FitResult cluster_fit(const Matrix& X, Index k_neighbors, const Hyperparams& hp,
                             const FitOptions& opts = {}) {
    const SampleGraph G = build_knn_graph(X, k_neighbors, KnnWeight::gaussian);
    return fit_identity(X.transpose(), G, hp, opts);
}

/// Average-linkage agglomerative clustering on rows of W_hat, cut at K.
/// Among equally close cluster pairs the one with the lowest indices merges
/// first; labels are numbered by first appearance in sample order.
inline ClusterAssignment extract_clusters(const WeightMatrix& W_hat, int K) {
    const Index n = W_hat.rows();
    if (K < 1 || K > n) {
        throw InputError(InputError::Kind::invalid_value, "",
                         "cluster count K=" + std::to_string(K) + " outside 1.." +
                             std::to_string(n));
    }
    Matrix D(n, n);
    for (Index a = 0; a < n; ++a) {
        for (Index b = 0; b < n; ++b) D(a, b) = (W_hat.row(a) - W_hat.row(b)).norm();
    }
    // Cluster c is identified by its smallest member index; sizes drive the
    // Lance-Williams update for average linkage.
    std::vector<bool> alive(static_cast<std::size_t>(n), true);
    std::vector<Index> size(static_cast<std::size_t>(n), 1);
    std::vector<Index> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), Index{0});

    for (Index clusters = n; clusters > K; --clusters) {
        double best = std::numeric_limits<double>::infinity();
        Index ba = -1, bb = -1;
        for (Index a = 0; a < n; ++a) {
            if (!alive[static_cast<std::size_t>(a)]) continue;
            for (Index b = a + 1; b < n; ++b) {
                if (!alive[static_cast<std::size_t>(b)]) continue;
                if (D(a, b) < best) {
                    best = D(a, b);
                    ba = a;
                    bb = b;
                }
            }
        }
        const double sa = static_cast<double>(size[static_cast<std::size_t>(ba)]);
        const double sb = static_cast<double>(size[static_cast<std::size_t>(bb)]);
        for (Index c = 0; c < n; ++c) {
            if (!alive[static_cast<std::size_t>(c)] || c == ba || c == bb) continue;
            const double merged = (sa * D(ba, c) + sb * D(bb, c)) / (sa + sb);
            D(ba, c) = D(c, ba) = merged;
        }
        alive[static_cast<std::size_t>(bb)] = false;
        size[static_cast<std::size_t>(ba)] += size[static_cast<std::size_t>(bb)];
        for (auto& p : parent) {
            if (p == bb) p = ba;
        }
    }

    ClusterAssignment out;
    out.labels.resize(static_cast<std::size_t>(n));
    std::map<Index, int> ids;
    for (Index i = 0; i < n; ++i) {
        auto [it, inserted] = ids.emplace(parent[static_cast<std::size_t>(i)],
                                          static_cast<int>(ids.size()) + 1);
        out.labels[static_cast<std::size_t>(i)] = it->second;
    }
    out.K = static_cast<int>(ids.size());
    return out;
}

inline ClusterAssignment make_assignment(std::vector<int> labels) {
    ClusterAssignment a;
    a.labels = std::move(labels);
    std::vector<int> distinct = a.labels;
    std::sort(distinct.begin(), distinct.end());
    a.K = static_cast<int>(std::unique(distinct.begin(), distinct.end()) - distinct.begin());
    return a;
}

/// Hubert-Arabie adjusted Rand index from the contingency table. Two
/// partitions that are both trivial in the same way score 1.
inline double adjusted_rand_index(const ClusterAssignment& a, const ClusterAssignment& b) {
    if (a.labels.size() != b.labels.size()) {
        throw InputError(InputError::Kind::dimension_mismatch, "",
                         "label vectors differ in length (" + std::to_string(a.labels.size()) +
                             " vs " + std::to_string(b.labels.size()) + ")");
    }
    const auto n = static_cast<double>(a.labels.size());
    auto choose2 = [](double m) { return m * (m - 1.0) / 2.0; };
    std::map<std::pair<int, int>, double> table;
    std::map<int, double> rows, cols;
    for (std::size_t i = 0; i < a.labels.size(); ++i) {
        table[{a.labels[i], b.labels[i]}] += 1.0;
        rows[a.labels[i]] += 1.0;
        cols[b.labels[i]] += 1.0;
    }
    double index = 0.0, sum_a = 0.0, sum_b = 0.0;
    for (const auto& [key, count] : table) index += choose2(count);
    for (const auto& [key, count] : rows) sum_a += choose2(count);
    for (const auto& [key, count] : cols) sum_b += choose2(count);
    const double total = choose2(n);
    const double expected = total > 0.0 ? sum_a * sum_b / total : 0.0;
    const double maximum = 0.5 * (sum_a + sum_b);
    if (maximum == expected) return 1.0;
    return (index - expected) / (maximum - expected);
}

}  // namespace locolasso
