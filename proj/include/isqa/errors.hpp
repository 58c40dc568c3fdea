#pragma once

#include <stdexcept>
#include <string>

namespace isqa {

/// Caller violated a precondition (bad dimension, out-of-range parameter,
/// unknown catalog name, ...).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite values or a breakdown that the analysis rules out in exact
/// arithmetic.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MetricBoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LineSearchFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class OracleFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace isqa
