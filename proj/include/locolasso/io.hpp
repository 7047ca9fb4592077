#pragma once

// CSV ingestion and export. Files store one sample per row; the in-memory
// design matrix is d x n, so loading transposes once at the boundary.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "locolasso/core.hpp"

namespace locolasso::io {

struct CsvOptions {
    bool header = false;  // skip the first line
    char delimiter = ',';
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

inline std::string where(const std::string& path, std::size_t line, std::size_t col = 0) {
    std::string loc = path + ":" + std::to_string(line);
    if (col > 0) loc += ":" + std::to_string(col);
    return loc;
}

inline double parse_cell(std::string_view cell, const std::string& path,
                         std::size_t line, std::size_t col) {
    cell = trim(cell);
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw InputError(InputError::Kind::non_numeric, where(path, line, col),
                         "non-numeric cell '" + std::string(cell) + "'");
    }
    if (!std::isfinite(value)) {
        throw InputError(InputError::Kind::invalid_value, where(path, line, col),
                         "non-finite cell '" + std::string(cell) + "'");
    }
    return value;
}

}  // namespace detail

/// Reads a rectangular numeric table; rows of the file become rows of the result.
inline Matrix read_csv(const std::string& path, const CsvOptions& opts = {}) {
    std::ifstream in(path);
    if (!in) throw InputError(InputError::Kind::io, path, "cannot open file");

    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (opts.header && lineno == 1) continue;
        if (detail::trim(line).empty()) continue;
        std::vector<double> row;
        std::string_view rest(line);
        std::size_t col = 0;
        while (true) {
            ++col;
            auto cut = rest.find(opts.delimiter);
            row.push_back(detail::parse_cell(rest.substr(0, cut), path, lineno, col));
            if (cut == std::string_view::npos) break;
            rest.remove_prefix(cut + 1);
        }
        if (rows.empty()) {
            width = row.size();
        } else if (row.size() != width) {
            throw InputError(InputError::Kind::dimension_mismatch,
                             detail::where(path, lineno),
                             "expected " + std::to_string(width) + " columns, found " +
                                 std::to_string(row.size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InputError(InputError::Kind::empty_file, path, "no data rows");

    Matrix M(static_cast<Index>(rows.size()), static_cast<Index>(width));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < width; ++c) {
            M(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
        }
    }
    return M;
}

/// A single column (one value per line) or a single row.
inline Vector read_vector_csv(const std::string& path, const CsvOptions& opts = {}) {
    Matrix M = read_csv(path, opts);
    if (M.cols() == 1) return M.col(0);
    if (M.rows() == 1) return M.row(0).transpose();
    throw InputError(InputError::Kind::dimension_mismatch, path,
                     "expected a single column of values, found " +
                         std::to_string(M.rows()) + "x" + std::to_string(M.cols()));
}

/// Samples are file rows; the returned X is d x n.
inline Dataset load_dataset(const std::string& x_path, const std::string& y_path,
                            bool add_bias, const CsvOptions& opts = {}) {
    Matrix rows = read_csv(x_path, opts);
    Vector y = read_vector_csv(y_path, opts);
    if (y.size() != rows.rows()) {
        throw InputError(InputError::Kind::dimension_mismatch, y_path,
                         std::to_string(y.size()) + " targets for " +
                             std::to_string(rows.rows()) + " samples in " + x_path);
    }
    Matrix X = rows.transpose();
    if (add_bias) return Dataset::with_bias(X, std::move(y));
    return Dataset(std::move(X), std::move(y), false);
}

/// Raw 1-based (i, j, weight) rows of an edge-list file.
struct EdgeRow {
    Index i;
    Index j;
    double weight;
};

inline std::vector<EdgeRow> read_edge_rows(const std::string& path, const CsvOptions& opts = {}) {
    std::ifstream probe(path);
    if (!probe) throw InputError(InputError::Kind::io, path, "cannot open file");
    std::string line;
    bool any = false;
    std::size_t lineno = 0;
    while (std::getline(probe, line)) {
        ++lineno;
        if (opts.header && lineno == 1) continue;
        if (!detail::trim(line).empty()) { any = true; break; }
    }
    if (!any) return {};

    Matrix M = read_csv(path, opts);
    if (M.cols() != 3) {
        throw InputError(InputError::Kind::dimension_mismatch, path,
                         "edge list needs 3 columns (i,j,weight), found " +
                             std::to_string(M.cols()));
    }
    std::vector<EdgeRow> out;
    out.reserve(static_cast<std::size_t>(M.rows()));
    for (Index r = 0; r < M.rows(); ++r) {
        double fi = M(r, 0), fj = M(r, 1);
        if (fi != std::floor(fi) || fj != std::floor(fj)) {
            throw InputError(InputError::Kind::invalid_value,
                             path + ": row " + std::to_string(r + 1),
                             "edge indices must be integers");
        }
        out.push_back({static_cast<Index>(fi), static_cast<Index>(fj), M(r, 2)});
    }
    return out;
}

/// Edge list over n training samples, 1-based indices in the file.
inline SampleGraph read_graph(const std::string& path, Index n, const CsvOptions& opts = {}) {
    std::vector<Edge> edges;
    for (const auto& row : read_edge_rows(path, opts)) {
        edges.push_back({row.i - 1, row.j - 1, row.weight});
    }
    try {
        return SampleGraph::from_edges(n, edges);
    } catch (const InputError& e) {
        throw InputError(e.kind(), path, e.what());
    }
}

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_csv(const std::string& path, const Matrix& M) {
    std::ofstream out(path);
    if (!out) throw InputError(InputError::Kind::io, path, "cannot write file");
    for (Index r = 0; r < M.rows(); ++r) {
        for (Index c = 0; c < M.cols(); ++c) {
            if (c) out << ',';
            out << format_double(M(r, c));
        }
        out << '\n';
    }
}

inline void write_vector_csv(const std::string& path, const Vector& v) {
    write_csv(path, Matrix(v));
}

/// Writes the upper-triangle edges, 1-based.
inline void write_graph(const std::string& path, const SampleGraph& g) {
    std::ofstream out(path);
    if (!out) throw InputError(InputError::Kind::io, path, "cannot write file");
    for (const auto& e : g.edges()) {
        out << (e.i + 1) << ',' << (e.j + 1) << ',' << format_double(e.weight) << '\n';
    }
}

}  // namespace locolasso::io
