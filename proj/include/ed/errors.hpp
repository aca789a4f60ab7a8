#pragma once

#include <stdexcept>
#include <string>

namespace ed {

/// Bad input: invalid grid, non-normalized density, mismatched shapes.
/// Mapped to exit code 2 by the CLI.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure at runtime: CFL violation, floor violation at a named
/// cell, non-convergent solve. Mapped to exit code 3 by the CLI.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ed
