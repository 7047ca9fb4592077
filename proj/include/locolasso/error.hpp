#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace locolasso {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (files, dimensions, indices).
class InputError : public Error {
public:
    enum class Kind {
        io,
        empty_file,
        non_numeric,
        dimension_mismatch,
        out_of_range,
        invalid_value,
    };

    InputError(Kind kind, std::string location, const std::string& what)
        : Error(location.empty() ? what : location + ": " + what),
          kind_(kind),
          location_(std::move(location)) {}

    Kind kind() const noexcept { return kind_; }
    const std::string& location() const noexcept { return location_; }

private:
    Kind kind_;
    std::string location_;
};

/// Rejected hyperparameters or option combinations.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Numerical failure inside an iterative solver. Carries the iteration at
/// which it happened and the objective values recorded up to that point.
class SolverError : public Error {
public:
    SolverError(const std::string& what, std::size_t iteration,
                std::vector<double> trace = {})
        : Error(what + " (iteration " + std::to_string(iteration) + ")"),
          iteration_(iteration),
          trace_(std::move(trace)) {}

    std::size_t iteration() const noexcept { return iteration_; }
    const std::vector<double>& trace() const noexcept { return trace_; }

private:
    std::size_t iteration_;
    std::vector<double> trace_;
};

}  // namespace locolasso
