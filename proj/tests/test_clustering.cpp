#include <random>

#include <gtest/gtest.h>

#include "locolasso/clustering.hpp"
#include "locolasso/experiments.hpp"
#include "oracles.hpp"

using namespace locolasso;

namespace {

std::vector<int> random_labels(std::mt19937& rng, std::size_t n, int k) {
    std::uniform_int_distribution<int> pick(1, k);
    std::vector<int> out(n);
    for (auto& v : out) v = pick(rng);
    return out;
}

}  // namespace

TEST(ClusterFit, UnregularizedReturnsTransposeExactly) {
    const auto inst = gen_synth_clustering(0);
    const auto r = cluster_fit(inst.X, 5, {.lambda1 = 0.0, .lambda2 = 0.0});
    EXPECT_EQ(r.W, Matrix(inst.X.transpose()));
}

TEST(ClusterFit, StrongFusionCollapsesToOneCentroid) {
    Matrix X = Matrix::Random(2, 12);
    Matrix R = Matrix::Ones(12, 12);
    R.diagonal().setZero();
    const auto G = SampleGraph::from_dense(R);
    const auto r = fit_identity(X.transpose(), G, {.lambda1 = 100.0, .lambda2 = 0.0});
    for (Index i = 1; i < 12; ++i) EXPECT_LE((r.W.row(i) - r.W.row(0)).norm(), 1e-4);
}

TEST(ClusterFit, TraceDescendsAndAuditHolds) {
    const auto inst = gen_synth_clustering(3);
    const auto G = build_knn_graph(inst.X, 5, KnnWeight::gaussian);
    Hyperparams hp{.lambda1 = 5.0, .lambda2 = 0.5};
    FitOptions opts;
    opts.on_step = [&](const WeightMatrix& prev, const WeightMatrix& next) {
        if (prev.size() == 0) return;
        const auto a = majorization_audit(next, prev, G, hp);
        EXPECT_LE(a.delta, 1e-9);
    };
    const auto r = cluster_fit(inst.X, 5, hp, opts);
    for (std::size_t t = 1; t < r.objective_trace.size(); ++t) {
        const double prev = r.objective_trace[t - 1];
        EXPECT_LE(r.objective_trace[t], prev + descent_slack(prev));
    }
}

TEST(ClusterFit, NetworkOnlyMatchesDirectConvexClusteringUpdates) {
    // plain convex clustering: w_j = (I + l1 L_t)^-1 x_j with L_t the
    // Laplacian of r_ij / s_ij at the previous iterate
    Matrix X = Matrix::Random(2, 10);
    const auto G = build_knn_graph(X, 3, KnnWeight::gaussian);
    const Matrix R = G.dense();
    Hyperparams hp{.lambda1 = 0.8, .lambda2 = 0.0, .max_iter = 15, .tol = 1e-15};
    const Matrix T = X.transpose();
    Matrix L = oracle::network_C(Matrix::Zero(10, 2), R, 1.0);  // unit distances
    Matrix W;
    for (int t = 0; t < 15; ++t) {
        Matrix A = Matrix::Identity(10, 10) + hp.lambda1 * L;
        W = A.ldlt().solve(T);
        L = oracle::network_C(W, R, hp.epsilon);
    }
    const auto r = fit_identity(T, G, hp);
    EXPECT_LE((r.W - W).norm(), 1e-8 * W.norm());
}

TEST(ClusterFit, SyntheticHasSparseDistinctFeatures) {
    const auto inst = gen_synth_clustering(1);
    const auto r = cluster_fit(inst.X, 5, {.lambda1 = 5.0, .lambda2 = 0.5});
    const auto labels = extract_clusters(r.W, 3);
    EXPECT_GE(adjusted_rand_index(labels, make_assignment(inst.true_labels)), 0.9);
    // cluster g is active on feature g; the other features shrink
    for (int g = 0; g < 3; ++g) {
        double on = 0.0, off = 0.0;
        for (Index i = 30 * g; i < 30 * (g + 1); ++i) {
            for (Index j = 0; j < 3; ++j) (j == g ? on : off) += std::abs(r.W(i, j));
        }
        EXPECT_GT(on / 30.0, off / 60.0);
    }
}

TEST(Extract, ExactRowGroupsRecovered) {
    Matrix W(6, 2);
    W << 1, 1, 5, 5, 1, 1, -3, 0, 5, 5, -3, 0;
    const auto a = extract_clusters(W, 3);
    EXPECT_EQ(a.K, 3);
    EXPECT_EQ(a.labels, (std::vector<int>{1, 2, 1, 3, 2, 3}));
}

TEST(Extract, DegenerateCuts) {
    Matrix W = Matrix::Random(7, 3);
    const auto one = extract_clusters(W, 1);
    EXPECT_EQ(one.K, 1);
    for (int l : one.labels) EXPECT_EQ(l, 1);
    const auto all = extract_clusters(W, 7);
    EXPECT_EQ(all.K, 7);
    EXPECT_EQ(all.labels, (std::vector<int>{1, 2, 3, 4, 5, 6, 7}));
    EXPECT_THROW(extract_clusters(W, 8), InputError);
    EXPECT_THROW(extract_clusters(W, 0), InputError);
}

TEST(Extract, AverageLinkageOnLine) {
    // points 0, 1, 3, 10: average linkage merges {0,1}, then {0,1,3}
    Matrix W(4, 1);
    W << 0, 1, 3, 10;
    EXPECT_EQ(extract_clusters(W, 2).labels, (std::vector<int>{1, 1, 1, 2}));
    EXPECT_EQ(extract_clusters(W, 3).labels, (std::vector<int>{1, 1, 2, 3}));
}

TEST(Extract, TiesGoToLowestIndices) {
    Matrix W(3, 1);
    W << 0, 1, 2;
    EXPECT_EQ(extract_clusters(W, 2).labels, (std::vector<int>{1, 1, 2}));
}

TEST(Ari, HandExamples) {
    const auto a = make_assignment({1, 1, 2, 2});
    const auto b = make_assignment({1, 2, 1, 2});
    EXPECT_NEAR(adjusted_rand_index(a, b), -0.5, 1e-15);
    EXPECT_NEAR(adjusted_rand_index(make_assignment({1, 1, 1, 1}), make_assignment({1, 2, 3, 4})),
                0.0, 1e-15);
    EXPECT_EQ(adjusted_rand_index(a, a), 1.0);
    EXPECT_THROW(adjusted_rand_index(a, make_assignment({1, 2})), InputError);
}

TEST(Ari, MatchesPairEnumeration) {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng() % 11;
        const auto a = random_labels(rng, n, 1 + static_cast<int>(rng() % 4));
        const auto b = random_labels(rng, n, 1 + static_cast<int>(rng() % 4));
        EXPECT_NEAR(adjusted_rand_index(make_assignment(a), make_assignment(b)),
                    oracle::ari_pairs(a, b), 1e-12);
    }
}

TEST(Ari, SymmetricAndLabelPermutationInvariant) {
    std::mt19937 rng(18);
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = random_labels(rng, 15, 3);
        const auto b = random_labels(rng, 15, 4);
        auto relabeled = a;
        for (auto& v : relabeled) v = 10 - v;
        const double ab = adjusted_rand_index(make_assignment(a), make_assignment(b));
        EXPECT_DOUBLE_EQ(ab, adjusted_rand_index(make_assignment(b), make_assignment(a)));
        EXPECT_NEAR(ab, adjusted_rand_index(make_assignment(relabeled), make_assignment(b)), 1e-15);
    }
}
