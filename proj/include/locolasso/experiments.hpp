#pragma once

// Synthetic benchmark generators, evaluation metrics, nested cross
// validation and the dimension-sweep timing harness.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "locolasso/core.hpp"
#include "locolasso/knn.hpp"
#include "locolasso/predictor.hpp"
#include "locolasso/solver.hpp"

namespace locolasso {

namespace detail {

/// Uniform draw on the open interval (lo, hi).
inline double open_uniform(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    double v = dist(rng);
    while (v <= lo) v = dist(rng);
    return v;
}

}  // namespace detail

struct SynthRegressionInstance {
    Dataset dataset;                           // d = 10, n = 30
    SampleGraph graph;                         // observed links
    SampleGraph true_graph;                    // complete within-group graph
    std::vector<int> groups;                   // 1..3 per sample
    std::vector<std::vector<Index>> true_support;  // 0-based features per group
    WeightMatrix true_W;                       // generating coefficients, n x d
};

/// Three groups of ten samples, ten Unif(-1, 1) features:
///   group 1: y = 5 x1 + x2 - x3 + 0.1 e
///   group 2: y = x2 - 5 x3 + x4 + 0.1 e
///   group 3: y = 0.5 x4 - 0.5 x5 + 0.1 e
/// Each within-group link is observed independently with probability 0.4.
inline SynthRegressionInstance gen_synth_regression(std::uint64_t seed) {
    constexpr Index d = 10, n = 30, group_size = 10;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::bernoulli_distribution observed(0.4);

    SynthRegressionInstance inst;
    Matrix X(d, n);
    for (Index i = 0; i < n; ++i) {
        for (Index k = 0; k < d; ++k) X(k, i) = detail::open_uniform(rng, -1.0, 1.0);
    }
    inst.true_W = WeightMatrix::Zero(n, d);
    const double coeffs[3][5] = {
        {5.0, 1.0, -1.0, 0.0, 0.0},
        {0.0, 1.0, -5.0, 1.0, 0.0},
        {0.0, 0.0, 0.0, 0.5, -0.5},
    };
    inst.true_support = {{0, 1, 2}, {1, 2, 3}, {3, 4}};
    Vector y(n);
    for (Index i = 0; i < n; ++i) {
        const Index g = i / group_size;
        inst.groups.push_back(static_cast<int>(g) + 1);
        for (Index k = 0; k < 5; ++k) inst.true_W(i, k) = coeffs[g][k];
        y(i) = inst.true_W.row(i).dot(X.col(i)) + 0.1 * noise(rng);
    }
    std::vector<Edge> all, kept;
    for (Index g = 0; g < 3; ++g) {
        for (Index a = g * group_size; a < (g + 1) * group_size; ++a) {
            for (Index b = a + 1; b < (g + 1) * group_size; ++b) {
                all.push_back({a, b, 1.0});
                if (observed(rng)) kept.push_back({a, b, 1.0});
            }
        }
    }
    inst.dataset = Dataset(std::move(X), std::move(y));
    inst.true_graph = SampleGraph::from_edges(n, all);
    inst.graph = SampleGraph::from_edges(n, kept);
    return inst;
}

struct SynthClusteringInstance {
    Matrix X;  // 3 x 90
    std::vector<int> true_labels;
};

/// Three blocks of thirty samples; block g has its own feature g shifted
/// (Unif(-3,-1), Unif(1,3), Unif(2,4)) and Unif(-1,1) everywhere else.
inline SynthClusteringInstance gen_synth_clustering(std::uint64_t seed) {
    constexpr Index d = 3, n = 90, block = 30;
    const double lo[3] = {-3.0, 1.0, 2.0};
    const double hi[3] = {-1.0, 3.0, 4.0};
    std::mt19937_64 rng(seed);
    SynthClusteringInstance inst;
    inst.X.resize(d, n);
    for (Index j = 0; j < n; ++j) {
        const Index g = j / block;
        inst.true_labels.push_back(static_cast<int>(g) + 1);
        for (Index i = 0; i < d; ++i) {
            inst.X(i, j) = i == g ? detail::open_uniform(rng, lo[g], hi[g])
                                  : detail::open_uniform(rng, -1.0, 1.0);
        }
    }
    return inst;
}

inline double rmse(const Vector& y_true, const Vector& y_pred) {
    if (y_true.size() != y_pred.size()) {
        throw InputError(InputError::Kind::dimension_mismatch, "", "rmse: length mismatch");
    }
    if (y_true.size() == 0) return 0.0;
    return std::sqrt((y_true - y_pred).squaredNorm() / static_cast<double>(y_true.size()));
}

struct GroupSupport {
    double precision = 0.0;
    double recall = 0.0;
};

/// Feature j is active for sample i when |W(i, j)| > threshold. Precision and
/// recall against the group's generating support are averaged over the
/// group's samples; an empty active set has precision 1.
inline std::vector<GroupSupport> support_metrics(const WeightMatrix& W_hat,
                                                 const std::vector<int>& groups,
                                                 const std::vector<std::vector<Index>>& supports,
                                                 double threshold = 1e-5) {
    if (!(threshold > 0.0)) throw ConfigError("support threshold must be > 0");
    if (static_cast<Index>(groups.size()) != W_hat.rows()) {
        throw InputError(InputError::Kind::dimension_mismatch, "", "group labels vs W rows");
    }
    std::vector<GroupSupport> out(supports.size());
    std::vector<int> counts(supports.size(), 0);
    for (Index i = 0; i < W_hat.rows(); ++i) {
        const auto g = static_cast<std::size_t>(groups[static_cast<std::size_t>(i)] - 1);
        const std::set<Index> truth(supports[g].begin(), supports[g].end());
        std::size_t active = 0, hit = 0;
        for (Index j = 0; j < W_hat.cols(); ++j) {
            if (std::abs(W_hat(i, j)) > threshold) {
                ++active;
                if (truth.count(j)) ++hit;
            }
        }
        out[g].precision += active ? static_cast<double>(hit) / static_cast<double>(active) : 1.0;
        out[g].recall += truth.empty() ? 1.0
                                       : static_cast<double>(hit) / static_cast<double>(truth.size());
        ++counts[g];
    }
    for (std::size_t g = 0; g < out.size(); ++g) {
        if (counts[g]) {
            out[g].precision /= counts[g];
            out[g].recall /= counts[g];
        }
    }
    return out;
}

/// Link vector of a held-out sample toward the training samples, taken from
/// the full graph. Empty when the sample has no link into the training set.
inline std::optional<Vector> links_to(const SampleGraph& G, Index sample,
                                      const std::vector<Index>& train) {
    Vector r = Vector::Zero(static_cast<Index>(train.size()));
    for (std::size_t k = 0; k < train.size(); ++k) r(static_cast<Index>(k)) = G.weight(sample, train[k]);
    if (!(r.array() > 0.0).any()) return std::nullopt;
    return r;
}

/// Fits on `train`, predicts every sample of `test`.
inline Vector fit_and_predict(const Dataset& data, const SampleGraph& G,
                              const std::vector<Index>& train, const std::vector<Index>& test,
                              const Hyperparams& hp, const FitOptions& opts = {}) {
    const FitResult fitted = fit(data.subset(train), G.induced(train), hp, opts);
    Vector pred(static_cast<Index>(test.size()));
    for (std::size_t k = 0; k < test.size(); ++k) {
        pred(static_cast<Index>(k)) =
            predict(fitted.W, data.bias_augmented(), data.X().col(test[k]),
                    links_to(G, test[k], train), WeberOptions{hp.epsilon});
    }
    return pred;
}

/// Splits `samples` into `folds` parts after a seeded shuffle; member m of
/// the shuffled order goes to part m mod folds.
inline std::vector<std::vector<Index>> split_folds(std::vector<Index> samples, std::size_t folds,
                                                   std::uint64_t seed) {
    if (folds < 2) throw ConfigError("cross validation needs at least 2 folds");
    if (samples.size() < folds) {
        throw ConfigError("cannot split " + std::to_string(samples.size()) + " samples into " +
                          std::to_string(folds) + " folds with nonempty training parts");
    }
    std::mt19937_64 rng(seed);
    std::shuffle(samples.begin(), samples.end(), rng);
    std::vector<std::vector<Index>> parts(folds);
    for (std::size_t m = 0; m < samples.size(); ++m) parts[m % folds].push_back(samples[m]);
    for (auto& p : parts) std::sort(p.begin(), p.end());
    return parts;
}

inline std::vector<Index> complement(const std::vector<Index>& all, const std::vector<Index>& part) {
    std::vector<Index> out;
    std::set_difference(all.begin(), all.end(), part.begin(), part.end(), std::back_inserter(out));
    return out;
}

struct InnerSplit {
    std::vector<Index> train;
    std::vector<Index> validation;
};

struct CvFold {
    std::vector<Index> train;
    std::vector<Index> test;
    std::vector<InnerSplit> inner;
    std::vector<double> inner_rmse;  // mean validation RMSE per grid point
    std::size_t selected = 0;        // grid index
    Vector predictions;              // aligned with `test`
    double test_rmse = 0.0;
};

struct CvResult {
    Hyperparams best;
    std::size_t best_index = 0;  // most frequent per-fold selection
    std::vector<double> fold_rmse;
    std::vector<CvFold> folds;
};

/// Outer folds estimate test error; within each outer training set an inner
/// split of the same arity picks the grid point with the lowest mean
/// validation RMSE (earlier grid entries win ties).
inline CvResult nested_cv(const Dataset& data, const SampleGraph& G,
                          const std::vector<Hyperparams>& grid, std::size_t folds,
                          std::uint64_t seed = 0, const FitOptions& opts = {}) {
    if (grid.empty()) throw ConfigError("hyperparameter grid is empty");
    if (G.n() != data.n()) {
        throw InputError(InputError::Kind::dimension_mismatch, "", "graph vs dataset size");
    }
    std::vector<Index> all(static_cast<std::size_t>(data.n()));
    std::iota(all.begin(), all.end(), Index{0});
    const auto outer = split_folds(all, folds, seed);

    CvResult result;
    std::vector<std::size_t> votes(grid.size(), 0);
    for (std::size_t f = 0; f < outer.size(); ++f) {
        CvFold fold;
        fold.test = outer[f];
        fold.train = complement(all, fold.test);
        const auto inner_parts = split_folds(fold.train, folds, seed + 1 + f);
        for (const auto& val : inner_parts) fold.inner.push_back({complement(fold.train, val), val});

        fold.inner_rmse.assign(grid.size(), 0.0);
        for (std::size_t g = 0; g < grid.size(); ++g) {
            for (const auto& split : fold.inner) {
                const Vector pred = fit_and_predict(data, G, split.train, split.validation, grid[g], opts);
                fold.inner_rmse[g] += rmse(data.subset(split.validation).y(), pred);
            }
            fold.inner_rmse[g] /= static_cast<double>(fold.inner.size());
        }
        fold.selected = static_cast<std::size_t>(
            std::min_element(fold.inner_rmse.begin(), fold.inner_rmse.end()) -
            fold.inner_rmse.begin());
        fold.predictions = fit_and_predict(data, G, fold.train, fold.test, grid[fold.selected], opts);
        fold.test_rmse = rmse(data.subset(fold.test).y(), fold.predictions);
        ++votes[fold.selected];
        result.fold_rmse.push_back(fold.test_rmse);
        result.folds.push_back(std::move(fold));
    }
    result.best_index =
        static_cast<std::size_t>(std::max_element(votes.begin(), votes.end()) - votes.begin());
    result.best = grid[result.best_index];
    return result;
}

struct BenchRow {
    Index d;
    double seconds;
};

struct BenchConfig {
    std::vector<Index> dims{10, 100, 1000};
    Index n = 100;
    std::size_t iterations = 10;
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    Index knn = 5;
    std::uint64_t seed = 0;
};

/// Fixed-iteration fits on random data over a dimension sweep; reports the
/// wall-clock time of each fit call.
inline std::vector<BenchRow> bench_dimension_sweep(const BenchConfig& cfg) {
    std::vector<BenchRow> out;
    for (Index d : cfg.dims) {
        if (d < 1) throw ConfigError("bench dimensions must be >= 1");
        std::mt19937_64 rng(cfg.seed + static_cast<std::uint64_t>(d));
        std::normal_distribution<double> gauss(0.0, 1.0);
        Matrix X(d, cfg.n);
        for (Index i = 0; i < cfg.n; ++i) {
            for (Index k = 0; k < d; ++k) X(k, i) = detail::open_uniform(rng, -1.0, 1.0);
        }
        Vector y(cfg.n);
        for (Index i = 0; i < cfg.n; ++i) y(i) = gauss(rng);
        const SampleGraph G = build_knn_graph(X, cfg.knn, KnnWeight::binary);
        const Dataset data(std::move(X), std::move(y));

        Hyperparams hp;
        hp.lambda1 = cfg.lambda1;
        hp.lambda2 = cfg.lambda2;
        hp.max_iter = cfg.iterations;
        FitOptions opts;
        opts.early_stop = false;
        const auto start = std::chrono::steady_clock::now();
        (void)fit(data, G, hp, opts);
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        out.push_back({d, elapsed.count()});
    }
    return out;
}

}  // namespace locolasso
