#pragma once

#include <stdexcept>
#include <string>

namespace jggl {

// Base of every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shapes or population counts that do not line up.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Cholesky failed (or an eigenvalue was nonpositive) where a PD matrix was required.
class NotPositiveDefinite : public Error {
public:
    using Error::Error;
};

// Out-of-domain scalar arguments (negative penalties, level outside (0,1), ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Malformed or degenerate input data (CSV parse failures, zero-variance columns,
// zero diagonals in a covariance).
class DataError : public Error {
public:
    using Error::Error;
};

// Invalid run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

// No solve on a tuning grid converged.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

}  // namespace jggl
