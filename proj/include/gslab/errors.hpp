#pragma once

#include <stdexcept>
#include <string>

namespace gslab {

/// Invalid problem parameters (exponent ranges, negative arguments, ...).
class ParamError : public std::runtime_error {
public:
    explicit ParamError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Operation called outside its regime (e.g. a critical-only identity).
class RegimeError : public std::runtime_error {
public:
    explicit RegimeError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Shooting failures: no bracket, step underflow, series start outside range.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A norm or moment integral diverges for the profile's tail.
class IntegrabilityError : public std::runtime_error {
public:
    explicit IntegrabilityError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Test function falls outside the admissible constraint set.
class ConstraintError : public std::runtime_error {
public:
    explicit ConstraintError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Degenerate regression input (too few points, no spread).
class FitError : public std::runtime_error {
public:
    explicit FitError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed or inconsistent run configuration.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace gslab
