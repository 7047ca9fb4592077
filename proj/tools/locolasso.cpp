// locolasso: fit, predict, cluster, synth and bench front end.
//
// Exit codes: 0 success (fit converged), 1 malformed input or usage error,
// 2 configuration error, 3 iteration limit reached without convergence.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "locolasso/locolasso.hpp"

namespace fs = std::filesystem;
using namespace locolasso;

namespace {

enum Exit { ok = 0, bad_input = 1, bad_config = 2, not_converged = 3 };

struct SolverFlags {
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    double epsilon = 1e-8;
    double tol = 1e-6;
    std::size_t max_iter = 100;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--lambda1", lambda1, "network penalty weight")->capture_default_str();
        cmd->add_option("--lambda2", lambda2, "exclusive penalty weight")->capture_default_str();
        cmd->add_option("--epsilon", epsilon, "smoothing constant")->capture_default_str();
        cmd->add_option("--tol", tol, "relative objective change to stop at")->capture_default_str();
        cmd->add_option("--max-iter", max_iter, "iteration limit")->capture_default_str();
    }

    Hyperparams hyper() const {
        Hyperparams hp{lambda1, lambda2, epsilon, max_iter, tol};
        try {
            hp.validate();
        } catch (const ConfigError& e) {
            throw ConfigError(std::string(e.what()) + " (check --lambda1, --lambda2, --epsilon, "
                                                      "--tol, --max-iter)");
        }
        return hp;
    }
};

void write_trace(const std::string& path, const std::vector<double>& trace) {
    std::ofstream out(path);
    if (!out) throw InputError(InputError::Kind::io, path, "cannot write trace");
    out << "iteration,objective\n";
    for (std::size_t t = 0; t < trace.size(); ++t) {
        out << (t + 1) << ',' << io::format_double(trace[t]) << '\n';
    }
}

void write_labels(const std::string& path, const std::vector<int>& labels) {
    std::ofstream out(path);
    if (!out) throw InputError(InputError::Kind::io, path, "cannot write labels");
    for (int l : labels) out << l << '\n';
}

std::vector<int> read_labels(const std::string& path, const io::CsvOptions& opts) {
    const Vector v = io::read_vector_csv(path, opts);
    std::vector<int> out;
    for (Index i = 0; i < v.size(); ++i) {
        if (v(i) != std::floor(v(i))) {
            throw InputError(InputError::Kind::invalid_value, path, "labels must be integers");
        }
        out.push_back(static_cast<int>(v(i)));
    }
    return out;
}

// ---- fit -------------------------------------------------------------------

struct FitArgs {
    std::string x, y, graph, out = "model.json", trace;
    Index knn = 0;
    bool bias = false, header = false;
    SolverFlags solver;
};

int cmd_fit(const FitArgs& a) {
    if (a.solver.lambda1 == 0.0 && a.solver.lambda2 == 0.0) {
        throw ConfigError("--lambda1 and --lambda2 are both 0; at least one must be positive");
    }
    const Hyperparams hp = a.solver.hyper();
    const io::CsvOptions csv{.header = a.header};
    const Dataset data = io::load_dataset(a.x, a.y, a.bias, csv);
    const SampleGraph G = a.graph.empty()
                              ? build_knn_graph(data.bias_augmented()
                                                    ? Matrix(data.X().topRows(data.d() - 1))
                                                    : data.X(),
                                                a.knn)
                              : io::read_graph(a.graph, data.n(), csv);

    const FitResult r = fit(data, G, hp);
    write_model(a.out, ModelFile::from_fit(r));
    if (!a.trace.empty()) write_trace(a.trace, r.objective_trace);
    std::cout << "iterations " << r.iterations << ", objective "
              << io::format_double(r.final_objective()) << ", "
              << (r.converged ? "converged" : "iteration limit reached") << '\n';
    return r.converged ? ok : not_converged;
}

// ---- predict ---------------------------------------------------------------

struct PredictArgs {
    std::string model, x, links, out, weights_out;
    bool header = false;
    double epsilon = 1e-8;
};

int cmd_predict(const PredictArgs& a) {
    const io::CsvOptions csv{.header = a.header};
    const ModelFile m = read_model(a.model);
    const Matrix X = io::read_csv(a.x, csv);  // one test sample per row
    const Index expected = m.bias_augmented ? m.d() - 1 : m.d();
    if (X.cols() != expected && X.cols() != m.d()) {
        throw InputError(InputError::Kind::dimension_mismatch, a.x,
                         "test rows have " + std::to_string(X.cols()) +
                             " features, model expects " + std::to_string(expected));
    }

    std::vector<std::optional<Vector>> links(static_cast<std::size_t>(X.rows()));
    if (!a.links.empty()) {
        for (const auto& row : io::read_edge_rows(a.links, csv)) {
            if (row.i < 1 || row.i > X.rows() || row.j < 1 || row.j > m.n()) {
                throw InputError(InputError::Kind::out_of_range, a.links,
                                 "link (" + std::to_string(row.i) + "," + std::to_string(row.j) +
                                     ") outside test rows 1.." + std::to_string(X.rows()) +
                                     " or training samples 1.." + std::to_string(m.n()));
            }
            if (!(row.weight >= 0.0) || !std::isfinite(row.weight)) {
                throw InputError(InputError::Kind::invalid_value, a.links,
                                 "link weights must be finite and >= 0");
            }
            auto& r = links[static_cast<std::size_t>(row.i - 1)];
            if (!r) r = Vector::Zero(m.n());
            (*r)(row.j - 1) += row.weight;
        }
    }

    const WeberOptions wopts{.epsilon = a.epsilon};
    Vector yhat(X.rows());
    Matrix weights(X.rows(), m.d());
    for (Index t = 0; t < X.rows(); ++t) {
        auto& r = links[static_cast<std::size_t>(t)];
        if (r && !(r->array() > 0.0).any()) r.reset();  // only zero weights: average
        const Vector w = interpolate_model(m.W, r, wopts);
        weights.row(t) = w.transpose();
        yhat(t) = w.dot(model_input(X.row(t).transpose(), m.d(), m.bias_augmented));
    }
    if (a.out.empty()) {
        for (Index t = 0; t < yhat.size(); ++t) std::cout << io::format_double(yhat(t)) << '\n';
    } else {
        io::write_vector_csv(a.out, yhat);
    }
    if (!a.weights_out.empty()) io::write_csv(a.weights_out, weights);
    return ok;
}

// ---- cluster ---------------------------------------------------------------

struct ClusterArgs {
    std::string x, out, weights_out, ari;
    Index k_neighbors = 5;
    int clusters = 0;
    bool header = false;
    SolverFlags solver;
};

int cmd_cluster(const ClusterArgs& a) {
    const Hyperparams hp = a.solver.hyper();
    const io::CsvOptions csv{.header = a.header};
    const Matrix X = io::read_csv(a.x, csv).transpose();  // d x n
    if (a.clusters < 1 || a.clusters > X.cols()) {
        throw InputError(InputError::Kind::out_of_range, "",
                         "--clusters " + std::to_string(a.clusters) + " outside 1.." +
                             std::to_string(X.cols()));
    }
    if (a.k_neighbors < 1 || a.k_neighbors >= X.cols()) {
        throw InputError(InputError::Kind::out_of_range, "",
                         "--k-neighbors must be in 1.." + std::to_string(X.cols() - 1));
    }
    const FitResult r = cluster_fit(X, a.k_neighbors, hp);
    const ClusterAssignment labels = extract_clusters(r.W, a.clusters);

    if (a.out.empty()) {
        for (int l : labels.labels) std::cout << l << '\n';
    } else {
        write_labels(a.out, labels.labels);
    }
    if (!a.weights_out.empty()) io::write_csv(a.weights_out, r.W);
    if (!a.ari.empty()) {
        const auto truth = make_assignment(read_labels(a.ari, csv));
        std::cout << "ARI " << io::format_double(adjusted_rand_index(labels, truth)) << '\n';
    }
    return r.converged ? ok : not_converged;
}

// ---- synth -----------------------------------------------------------------

struct SynthArgs {
    std::string kind, out_dir = ".";
    std::uint64_t seed = 0;
};

int cmd_synth(const SynthArgs& a) {
    const fs::path dir(a.out_dir);
    if (a.kind != "regression" && a.kind != "clustering") {
        throw InputError(InputError::Kind::invalid_value, "",
                         "unknown --kind '" + a.kind + "' (expected regression or clustering)");
    }
    fs::create_directories(dir);
    if (a.kind == "regression") {
        const auto inst = gen_synth_regression(a.seed);
        io::write_csv((dir / "x.csv").string(), inst.dataset.X().transpose());
        io::write_vector_csv((dir / "y.csv").string(), inst.dataset.y());
        io::write_graph((dir / "graph.csv").string(), inst.graph);
        io::write_graph((dir / "true_graph.csv").string(), inst.true_graph);
        io::write_csv((dir / "true_w.csv").string(), inst.true_W);
        write_labels((dir / "groups.csv").string(), inst.groups);
    } else {
        const auto inst = gen_synth_clustering(a.seed);
        io::write_csv((dir / "x.csv").string(), inst.X.transpose());
        write_labels((dir / "labels.csv").string(), inst.true_labels);
    }
    std::cout << "wrote " << a.kind << " instance (seed " << a.seed << ") to " << dir.string()
              << '\n';
    return ok;
}

// ---- bench -----------------------------------------------------------------

struct BenchArgs {
    BenchConfig cfg;
    std::string out;
};

int cmd_bench(const BenchArgs& a) {
    const auto rows = bench_dimension_sweep(a.cfg);
    std::ofstream file;
    if (!a.out.empty()) {
        file.open(a.out);
        if (!file) throw InputError(InputError::Kind::io, a.out, "cannot write timings");
    }
    std::ostream& out = a.out.empty() ? std::cout : file;
    out << "d,seconds\n";
    for (const auto& r : rows) out << r.d << ',' << io::format_double(r.seconds) << '\n';
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Localized Lasso: per-sample sparse linear models on a sample graph"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    FitArgs fa;
    auto* fit_cmd = app.add_subcommand("fit", "fit one sparse model per training sample");
    fit_cmd->add_option("--x", fa.x, "features CSV, one sample per row")->required();
    fit_cmd->add_option("--y", fa.y, "targets CSV, one value per row")->required();
    auto* graph_opt = fit_cmd->add_option("--graph", fa.graph, "edge list i,j,weight (1-based)");
    auto* knn_opt = fit_cmd->add_option("--knn", fa.knn, "build a k-NN graph instead of --graph");
    graph_opt->excludes(knn_opt);
    fit_cmd->add_option("--out", fa.out, "model file")->capture_default_str();
    fit_cmd->add_option("--trace", fa.trace, "objective trace CSV");
    fit_cmd->add_flag("--bias", fa.bias, "append a constant feature");
    fit_cmd->add_flag("--header", fa.header, "input CSVs have a header line");
    fa.solver.add_to(fit_cmd);

    PredictArgs pa;
    auto* predict_cmd = app.add_subcommand("predict", "predict test samples from a model file");
    predict_cmd->add_option("--model", pa.model, "model file written by fit")->required();
    predict_cmd->add_option("--x", pa.x, "test features CSV, one sample per row")->required();
    predict_cmd->add_option("--links", pa.links,
                            "edge list test_row,train_sample,weight (1-based)");
    predict_cmd->add_option("--out", pa.out, "predictions CSV (stdout if omitted)");
    predict_cmd->add_option("--weights-out", pa.weights_out, "per-test-sample model CSV");
    predict_cmd->add_option("--epsilon", pa.epsilon, "Weber smoothing constant")
        ->capture_default_str();
    predict_cmd->add_flag("--header", pa.header, "input CSVs have a header line");

    ClusterArgs ca;
    ca.solver.lambda1 = 5.0;
    ca.solver.lambda2 = 0.5;
    auto* cluster_cmd = app.add_subcommand("cluster", "sparse convex clustering");
    cluster_cmd->add_option("--x", ca.x, "data CSV, one sample per row")->required();
    cluster_cmd->add_option("--clusters", ca.clusters, "number of clusters K")->required();
    cluster_cmd->add_option("--k-neighbors", ca.k_neighbors, "k-NN graph size")
        ->capture_default_str();
    cluster_cmd->add_option("--out", ca.out, "labels CSV (stdout if omitted)");
    cluster_cmd->add_option("--weights-out", ca.weights_out, "fitted W CSV");
    cluster_cmd->add_option("--ari", ca.ari, "true labels CSV; prints the adjusted Rand index");
    cluster_cmd->add_flag("--header", ca.header, "input CSVs have a header line");
    ca.solver.add_to(cluster_cmd);

    SynthArgs sa;
    auto* synth_cmd = app.add_subcommand("synth", "write a synthetic instance");
    synth_cmd->add_option("--kind", sa.kind, "regression or clustering")->required();
    synth_cmd->add_option("--seed", sa.seed)->capture_default_str();
    synth_cmd->add_option("--out-dir", sa.out_dir)->capture_default_str();

    BenchArgs ba;
    auto* bench_cmd = app.add_subcommand("bench", "fixed-iteration timing over a dimension sweep");
    bench_cmd->add_option("--dims", ba.cfg.dims, "feature dimensions")->delimiter(',')
        ->capture_default_str();
    bench_cmd->add_option("--n", ba.cfg.n, "samples")->capture_default_str();
    bench_cmd->add_option("--max-iter", ba.cfg.iterations, "iterations per fit")
        ->capture_default_str();
    bench_cmd->add_option("--knn", ba.cfg.knn, "k-NN graph size")->capture_default_str();
    bench_cmd->add_option("--lambda1", ba.cfg.lambda1)->capture_default_str();
    bench_cmd->add_option("--lambda2", ba.cfg.lambda2)->capture_default_str();
    bench_cmd->add_option("--seed", ba.cfg.seed)->capture_default_str();
    bench_cmd->add_option("--out", ba.out, "timing CSV (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return bad_input;
    }

    try {
        if (*fit_cmd) {
            if (fa.graph.empty() && fa.knn == 0) {
                std::cerr << "error: fit needs --graph or --knn\n" << fit_cmd->help();
                return bad_input;
            }
            return cmd_fit(fa);
        }
        if (*predict_cmd) return cmd_predict(pa);
        if (*cluster_cmd) return cmd_cluster(ca);
        if (*synth_cmd) return cmd_synth(sa);
        if (*bench_cmd) return cmd_bench(ba);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return bad_config;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return bad_input;
    } catch (const SolverError& e) {
        std::cerr << "solver error at iteration " << e.iteration() << ": " << e.what() << '\n';
        return bad_input;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return bad_input;
    }
    return bad_input;
}
