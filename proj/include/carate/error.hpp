#ifndef CARATE_ERROR_HPP_
#define CARATE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace carate {

// Malformed or non-estimable input data (CLI exit code 2).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A (treatment, stratum) regression cannot be fitted: collinear covariates,
// a leverage-one observation, or too few units.
class NotEstimableError : public DataError {
 public:
  using DataError::DataError;
};

// Numerical breakdown in an otherwise valid computation (CLI exit code 70).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or arguments (CLI exit code 64).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace carate

#endif  // CARATE_ERROR_HPP_
