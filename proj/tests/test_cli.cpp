// End-to-end runs of the locolasso binary.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "locolasso/locolasso.hpp"

using namespace locolasso;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               (std::string("locolasso_cli_") +
                ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    // Runs the CLI with stdout and stderr captured in output_.
    int run(const std::string& args) {
        const std::string log = path("log.txt");
        const std::string cmd = std::string("\"") + LOCOLASSO_CLI + "\" " + args + " > \"" + log +
                                "\" 2>&1";
        const int status = std::system(cmd.c_str());
        std::ifstream in(log);
        output_.assign(std::istreambuf_iterator<char>(in), {});
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    void synth_regression(int seed = 0) {
        ASSERT_EQ(run("synth --kind regression --seed " + std::to_string(seed) + " --out-dir " +
                      path("reg")),
                  0)
            << output_;
    }

    std::string fit_args() const {
        return "fit --x " + path("reg/x.csv") + " --y " + path("reg/y.csv") + " --graph " +
               path("reg/graph.csv");
    }

    fs::path dir_;
    std::string output_;
};

std::string slurp(const std::string& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_F(Cli, SynthIsDeterministicAndLoadable) {
    synth_regression(3);
    ASSERT_EQ(run("synth --kind regression --seed 3 --out-dir " + path("again")), 0);
    for (const char* f : {"x.csv", "y.csv", "graph.csv", "groups.csv", "true_w.csv"}) {
        EXPECT_EQ(slurp(path(std::string("reg/") + f)), slurp(path(std::string("again/") + f))) << f;
    }
    const Dataset data = io::load_dataset(path("reg/x.csv"), path("reg/y.csv"), false);
    const auto inst = gen_synth_regression(3);
    EXPECT_EQ(data.X(), inst.dataset.X());
    EXPECT_EQ(data.y(), inst.dataset.y());
    EXPECT_EQ(io::read_graph(path("reg/graph.csv"), 30).dense(), inst.graph.dense());
}

TEST_F(Cli, SynthUnknownKind) {
    EXPECT_EQ(run("synth --kind spiral --out-dir " + path("s")), 1);
    EXPECT_NE(output_.find("spiral"), std::string::npos);
}

TEST_F(Cli, FitConvergesAndTraceDescends) {
    synth_regression();
    ASSERT_EQ(run(fit_args() + " --lambda1 5 --lambda2 1 --out " + path("m.json") + " --trace " +
                  path("trace.csv")),
              0)
        << output_;
    const ModelFile m = read_model(path("m.json"));
    EXPECT_EQ(m.n(), 30);
    EXPECT_EQ(m.d(), 10);
    EXPECT_TRUE(m.converged);
    const Matrix trace = io::read_csv(path("trace.csv"), {.header = true});
    ASSERT_EQ(trace.rows(), static_cast<Index>(m.iterations));
    for (Index t = 1; t < trace.rows(); ++t) {
        EXPECT_LE(trace(t, 1), trace(t - 1, 1) + descent_slack(trace(t - 1, 1)));
    }
    // same model as the library call
    const auto inst = gen_synth_regression(0);
    const auto r = fit(inst.dataset, inst.graph, {.lambda1 = 5, .lambda2 = 1});
    EXPECT_EQ(m.W, r.W);
}

TEST_F(Cli, FitIterationLimitExitsThree) {
    synth_regression();
    EXPECT_EQ(run(fit_args() + " --max-iter 2 --out " + path("m.json")), 3) << output_;
    EXPECT_TRUE(fs::exists(path("m.json")));
    EXPECT_FALSE(read_model(path("m.json")).converged);
}

TEST_F(Cli, FitBothLambdasZeroExitsTwo) {
    synth_regression();
    EXPECT_EQ(run(fit_args() + " --lambda1 0 --lambda2 0 --out " + path("m.json")), 2);
    EXPECT_NE(output_.find("--lambda1"), std::string::npos);
    EXPECT_NE(output_.find("--lambda2"), std::string::npos);
}

TEST_F(Cli, FitMissingTargetsShowsUsage) {
    synth_regression();
    EXPECT_EQ(run("fit --x " + path("reg/x.csv") + " --knn 5"), 1);
    EXPECT_NE(output_.find("--y"), std::string::npos);
    EXPECT_NE(output_.find("Usage"), std::string::npos) << output_;
}

TEST_F(Cli, FitMalformedInputExitsOne) {
    synth_regression();
    std::ofstream(path("bad.csv")) << "1,2\nx,3\n";
    EXPECT_EQ(run("fit --x " + path("bad.csv") + " --y " + path("reg/y.csv") + " --knn 1"), 1);
    EXPECT_NE(output_.find(":2:1"), std::string::npos) << output_;
    EXPECT_EQ(run("fit --x " + path("reg/x.csv") + " --y " + path("reg/y.csv")), 1);  // no graph
}

TEST_F(Cli, FitWithKnnAndBias) {
    synth_regression();
    ASSERT_EQ(run("fit --x " + path("reg/x.csv") + " --y " + path("reg/y.csv") +
                  " --knn 5 --bias --out " + path("m.json")),
              0)
        << output_;
    const ModelFile m = read_model(path("m.json"));
    EXPECT_TRUE(m.bias_augmented);
    EXPECT_EQ(m.d(), 11);
}

TEST_F(Cli, PredictMatchesLibrary) {
    synth_regression();
    ASSERT_EQ(run(fit_args() + " --out " + path("m.json")), 0) << output_;
    const ModelFile m = read_model(path("m.json"));
    Matrix test = Matrix::Random(3, 10);
    io::write_csv(path("test.csv"), test);
    std::ofstream(path("links.csv")) << "1,4,1\n1,5,0.5\n3,30,2\n";

    ASSERT_EQ(run("predict --model " + path("m.json") + " --x " + path("test.csv") + " --links " +
                  path("links.csv") + " --out " + path("pred.csv") + " --weights-out " +
                  path("w.csv")),
              0)
        << output_;
    const Vector pred = io::read_vector_csv(path("pred.csv"));
    ASSERT_EQ(pred.size(), 3);
    Vector r1 = Vector::Zero(30);
    r1(3) = 1.0;
    r1(4) = 0.5;
    Vector r3 = Vector::Zero(30);
    r3(29) = 2.0;
    EXPECT_EQ(pred(0), predict(m.W, false, test.row(0).transpose(), r1));
    EXPECT_EQ(pred(1), predict(m.W, false, test.row(1).transpose()));
    EXPECT_EQ(pred(2), predict(m.W, false, test.row(2).transpose(), r3));
    const Matrix w = io::read_csv(path("w.csv"));
    EXPECT_EQ(w.rows(), 3);
    EXPECT_LE((w.row(2) - m.W.row(29)).norm(), 1e-12);
}

TEST_F(Cli, PredictDimensionMismatch) {
    synth_regression();
    ASSERT_EQ(run(fit_args() + " --out " + path("m.json")), 0);
    io::write_csv(path("test.csv"), Matrix::Random(2, 7));
    EXPECT_EQ(run("predict --model " + path("m.json") + " --x " + path("test.csv")), 1);
    std::ofstream(path("links.csv")) << "1,31,1\n";
    io::write_csv(path("ok.csv"), Matrix::Random(2, 10));
    EXPECT_EQ(run("predict --model " + path("m.json") + " --x " + path("ok.csv") + " --links " +
                  path("links.csv")),
              1);
}

TEST_F(Cli, ClusterReportsAri) {
    ASSERT_EQ(run("synth --kind clustering --seed 1 --out-dir " + path("c")), 0);
    ASSERT_EQ(run("cluster --x " + path("c/x.csv") + " --clusters 3 --k-neighbors 5 --lambda1 5 "
                  "--lambda2 0.5 --ari " + path("c/labels.csv") + " --out " + path("labels.csv")),
              0)
        << output_;
    const auto pos = output_.find("ARI ");
    ASSERT_NE(pos, std::string::npos) << output_;
    EXPECT_GE(std::stod(output_.substr(pos + 4)), 0.9);
    EXPECT_EQ(io::read_vector_csv(path("labels.csv")).size(), 90);
}

TEST_F(Cli, ClusterZeroPenaltyReturnsInput) {
    ASSERT_EQ(run("synth --kind clustering --seed 2 --out-dir " + path("c")), 0);
    ASSERT_EQ(run("cluster --x " + path("c/x.csv") + " --clusters 3 --lambda1 0 --lambda2 0 "
                  "--weights-out " + path("w.csv") + " --out " + path("l.csv")),
              0)
        << output_;
    EXPECT_EQ(io::read_csv(path("w.csv")), io::read_csv(path("c/x.csv")));
}

TEST_F(Cli, ClusterTooManyClusters) {
    ASSERT_EQ(run("synth --kind clustering --seed 0 --out-dir " + path("c")), 0);
    EXPECT_EQ(run("cluster --x " + path("c/x.csv") + " --clusters 91"), 1);
}

TEST_F(Cli, BenchSingleDimension) {
    ASSERT_EQ(run("bench --dims 10 --n 30 --max-iter 2 --out " + path("b.csv")), 0) << output_;
    const Matrix rows = io::read_csv(path("b.csv"), {.header = true});
    ASSERT_EQ(rows.rows(), 1);
    EXPECT_EQ(rows(0, 0), 10.0);
    EXPECT_GT(rows(0, 1), 0.0);
}

TEST_F(Cli, NoSubcommandIsUsageError) { EXPECT_EQ(run(""), 1); }
