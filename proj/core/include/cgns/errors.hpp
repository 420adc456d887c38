#pragma once

#include <stdexcept>
#include <string>

namespace cgns {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: invalid parameters, malformed configuration, schema
/// mismatches. The CLI maps these to exit code 2.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

class InvalidParams : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// Numerical breakdown at a given model time. The CLI maps these to exit code 3.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, double t);
  double time() const noexcept { return t_; }

 private:
  double t_;
};

class NonFiniteCoefficient : public NumericError {
 public:
  explicit NonFiniteCoefficient(double t, const std::string& detail = {});
};

/// Observation-noise Gramian failed the Cholesky positive-definiteness test.
class SingularObservationGramian : public NumericError {
 public:
  explicit SingularObservationGramian(double t);
};

class NotPsd : public NumericError {
 public:
  NotPsd(const std::string& matrix_name, double min_eigenvalue, double t);
  double min_eigenvalue() const noexcept { return min_eig_; }

 private:
  double min_eig_;
};

class NonFiniteState : public NumericError {
 public:
  explicit NonFiniteState(double t, const std::string& detail = {});
};

class CovarianceBlowup : public NumericError {
 public:
  CovarianceBlowup(double t, double trace);
};

/// Filter covariance is not strictly positive definite where the smoother or
/// backward sampler needs its inverse.
class FilterCovSingular : public NumericError {
 public:
  FilterCovSingular(double t, double min_eigenvalue);
};

/// A normalized metric was requested for a series with zero temporal spread.
class DegenerateSeries : public Error {
 public:
  using Error::Error;
};

}  // namespace cgns
