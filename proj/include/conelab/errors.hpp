#pragma once

#include <stdexcept>
#include <string>

namespace conelab {

// Error categories mirror the CLI exit codes: parse -> 1, constraint -> 2,
// solver -> 3, I/O -> 4. Everything else is a plain runtime_error.

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

struct ConstraintError : std::runtime_error {
    explicit ConstraintError(const std::string& what) : std::runtime_error(what) {}
};

struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace conelab
