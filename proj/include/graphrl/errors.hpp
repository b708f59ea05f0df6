#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace graphrl {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Incompatible shapes (matrix products, metric inputs, window lengths, ...).
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Input data fails a documented precondition (asymmetric adjacency, bad CSV, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Input is too short/small; the message states the required minimum.
class SizingError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// A value outside the accepted domain (e.g. unknown action id).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration (bad field value, unknown config key, missing file).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// API misuse: a call that violates the object's state contract.
class ContractError : public Error {
public:
    using Error::Error;
};

/// Numerical failure (e.g. Cholesky factorization despite jitter escalation).
class NumericError : public Error {
public:
    using Error::Error;
};

/// Training diverged; carries the epoch at which it happened.
class TrainingError : public Error {
public:
    TrainingError(const std::string& message, std::size_t epoch)
        : Error(message + " (epoch " + std::to_string(epoch) + ")"), epoch_(epoch) {}

    std::size_t epoch() const noexcept { return epoch_; }

private:
    std::size_t epoch_;
};

/// Hyperparameter tuning could not proceed (e.g. objective failed everywhere).
class TuningError : public Error {
public:
    using Error::Error;
};

} // namespace graphrl
