#pragma once

#include <stdexcept>
#include <string>

namespace liesym {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration (unknown profile, bad fractions, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A transform or family parameter outside its admissible range.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Evaluation requested outside a function's region of validity.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Singular normal equations with no regularization.
class RankError : public Error {
public:
    using Error::Error;
};

/// Metric undefined for the given inputs (e.g. zero reference norm).
class MetricError : public Error {
public:
    using Error::Error;
};

/// The greedy solver could not continue (degenerate scores, non-finite loss).
class SolverAbort : public Error {
public:
    using Error::Error;
};

} // namespace liesym
