#pragma once

// Versioned JSON model document. Small weight matrices are stored inline as
// row arrays, large ones in a CSV sidecar; both use 17 significant digits.

#include <cctype>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "locolasso/io.hpp"
#include "locolasso/solver.hpp"

namespace locolasso {

struct ModelFile {
    static constexpr int schema_version = 1;
    static constexpr Index inline_limit = 100000;  // entries

    WeightMatrix W;
    bool bias_augmented = false;
    Hyperparams hyper;
    std::size_t iterations = 0;
    bool converged = false;
    double final_objective = 0.0;

    Index n() const { return W.rows(); }
    Index d() const { return W.cols(); }

    static ModelFile from_fit(const FitResult& r) {
        ModelFile m;
        m.W = r.W;
        m.bias_augmented = r.bias_augmented;
        m.hyper = r.hyper;
        m.iterations = r.iterations;
        m.converged = r.converged;
        m.final_objective = r.final_objective();
        return m;
    }
};

inline void write_model(const std::string& path, const ModelFile& m) {
    nlohmann::json doc;
    doc["schema_version"] = ModelFile::schema_version;
    doc["n"] = m.n();
    doc["d"] = m.d();
    doc["bias"] = m.bias_augmented;
    doc["hyperparams"] = {{"lambda1", m.hyper.lambda1},   {"lambda2", m.hyper.lambda2},
                          {"epsilon", m.hyper.epsilon},   {"max_iter", m.hyper.max_iter},
                          {"tol", m.hyper.tol}};
    doc["diagnostics"] = {{"iterations", m.iterations},
                          {"converged", m.converged},
                          {"final_objective", m.final_objective}};
    std::string inline_rows;
    if (m.W.size() <= ModelFile::inline_limit) {
        // written by hand: the JSON library emits shortest round-trip doubles,
        // the file format asks for 17 significant digits
        inline_rows = "[";
        for (Index i = 0; i < m.W.rows(); ++i) {
            inline_rows += i ? ",\n    [" : "\n    [";
            for (Index j = 0; j < m.W.cols(); ++j) {
                if (j) inline_rows += ", ";
                inline_rows += io::format_double(m.W(i, j));
            }
            inline_rows += ']';
        }
        inline_rows += "\n  ]";
    } else {
        const std::filesystem::path sidecar = std::filesystem::path(path).string() + ".W.csv";
        io::write_csv(sidecar.string(), m.W);
        doc["W_file"] = sidecar.filename().string();
    }
    std::string text = doc.dump(2);
    if (!inline_rows.empty()) {
        text.erase(text.find_last_of('}'));
        while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.pop_back();
        text += ",\n  \"W\": " + inline_rows + "\n}";
    }
    std::ofstream out(path);
    if (!out) throw InputError(InputError::Kind::io, path, "cannot write model");
    out << text << '\n';
}

inline ModelFile read_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError(InputError::Kind::io, path, "cannot open model");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(InputError::Kind::invalid_value, path, std::string("bad JSON: ") + e.what());
    }
    try {
        if (doc.at("schema_version").get<int>() != ModelFile::schema_version) {
            throw InputError(InputError::Kind::invalid_value, path, "unsupported schema_version");
        }
        ModelFile m;
        const auto n = doc.at("n").get<Index>();
        const auto d = doc.at("d").get<Index>();
        m.bias_augmented = doc.at("bias").get<bool>();
        const auto& hp = doc.at("hyperparams");
        m.hyper.lambda1 = hp.at("lambda1").get<double>();
        m.hyper.lambda2 = hp.at("lambda2").get<double>();
        m.hyper.epsilon = hp.at("epsilon").get<double>();
        m.hyper.max_iter = hp.at("max_iter").get<std::size_t>();
        m.hyper.tol = hp.at("tol").get<double>();
        const auto& diag = doc.at("diagnostics");
        m.iterations = diag.at("iterations").get<std::size_t>();
        m.converged = diag.at("converged").get<bool>();
        m.final_objective = diag.at("final_objective").get<double>();
        if (doc.contains("W")) {
            const auto& rows = doc.at("W");
            if (static_cast<Index>(rows.size()) != n) {
                throw InputError(InputError::Kind::dimension_mismatch, path, "W row count != n");
            }
            m.W.resize(n, d);
            for (Index i = 0; i < n; ++i) {
                const auto& row = rows.at(static_cast<std::size_t>(i));
                if (static_cast<Index>(row.size()) != d) {
                    throw InputError(InputError::Kind::dimension_mismatch, path,
                                     "W row " + std::to_string(i + 1) + " length != d");
                }
                for (Index j = 0; j < d; ++j) m.W(i, j) = row.at(static_cast<std::size_t>(j)).get<double>();
            }
        } else {
            const auto sidecar = std::filesystem::path(path).parent_path() /
                                 doc.at("W_file").get<std::string>();
            m.W = io::read_csv(sidecar.string());
            if (m.W.rows() != n || m.W.cols() != d) {
                throw InputError(InputError::Kind::dimension_mismatch, sidecar.string(),
                                 "sidecar shape does not match n x d");
            }
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(InputError::Kind::invalid_value, path,
                         std::string("malformed model: ") + e.what());
    }
}

}  // namespace locolasso
