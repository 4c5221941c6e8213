#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fiducial {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function or distribution.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Observed data cannot support the requested statistic (zero spread, no MLE, ...).
class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

/// Root bracket without a sign change, or a non-finite evaluation inside it.
class BracketError : public Error {
 public:
  using Error::Error;
};

/// Structural equation could not be inverted for the drawn primary value.
///
/// Carries enough state to reproduce the failure.
class StructuralError : public Error {
 public:
  StructuralError(const std::string& what, std::string param, double statistic,
                  double primary)
      : Error(what), param_(std::move(param)), statistic_(statistic), primary_(primary) {}

  const std::string& param() const noexcept { return param_; }
  double statistic() const noexcept { return statistic_; }
  double primary() const noexcept { return primary_; }

  // Filled in by the sampler when the failure happens inside a chain.
  long chain = -1;
  long cycle = -1;
  std::vector<double> state;

 private:
  std::string param_;
  double statistic_;
  double primary_;
};

}  // namespace fiducial
