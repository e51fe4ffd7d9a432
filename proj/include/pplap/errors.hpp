#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace pplap {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Arguments outside the documented domain of an operation.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Operation not defined on the given domain kind (e.g. a Hessian on a graph).
class UnsupportedOperation : public Error {
public:
    using Error::Error;
};

/// An iterative method hit its iteration cap or stalled.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// The inner Cordes map failed to contract.
class ContractionFailure : public ConvergenceError {
public:
    ContractionFailure(const std::string& what, double observed_ratio, double theoretical_bound)
        : ConvergenceError(what), observed_ratio_(observed_ratio), theoretical_bound_(theoretical_bound) {}

    double observed_ratio() const noexcept { return observed_ratio_; }
    double theoretical_bound() const noexcept { return theoretical_bound_; }

private:
    double observed_ratio_;
    double theoretical_bound_;
};

/// The outer fixed-point loop kept increasing the energy after all damping retries.
class DivergenceError : public ConvergenceError {
public:
    using ConvergenceError::ConvergenceError;
};

/// Malformed configuration or spec file; carries the offending line (0 if unknown).
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, int line = 0, std::string field = {})
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line), field_(std::move(field)) {}

    int line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    int line_;
    std::string field_;
};

}  // namespace pplap
