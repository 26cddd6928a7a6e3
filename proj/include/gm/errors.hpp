#pragma once

#include <stdexcept>
#include <string>

namespace gm {

/// Invalid user-supplied configuration (grid sizes, exponents, flags).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A linear solve or eigensolve failed to reach its tolerance.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual)
        : std::runtime_error(what), final_residual(residual) {}
    double final_residual;
};

/// Constant calibration could not satisfy the required inequalities.
class CalibrationError : public std::runtime_error {
public:
    explicit CalibrationError(const std::string& what) : std::runtime_error(what) {}
};

/// Mathematical precondition violated (zero field, ordering, NaN).
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace gm
