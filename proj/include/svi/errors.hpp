#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace svi {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition violated by the caller (bad dimension, empty input, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// The requested operation needs data the object does not carry.
class Unsupported : public Error {
 public:
  using Error::Error;
};

/// A non-finite value appeared during a computation.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, long long iteration = -1,
               std::vector<double> iterate = {})
      : Error(what), iteration_(iteration), iterate_(std::move(iterate)) {}

  long long iteration() const { return iteration_; }
  const std::vector<double>& iterate() const { return iterate_; }

 private:
  long long iteration_;
  std::vector<double> iterate_;
};

/// Equilibrium recovery hit the trivial (artificial) LCP solution.
class DegenerateSolution : public Error {
 public:
  using Error::Error;
};

/// A step-size policy violates the admissible bound for its algorithm.
class StepSizeRejected : public Error {
 public:
  StepSizeRejected(const std::string& what, double alpha_upper, double bound)
      : Error(what), alpha_upper_(alpha_upper), bound_(bound) {}

  double alpha_upper() const { return alpha_upper_; }
  double bound() const { return bound_; }

 private:
  double alpha_upper_;
  double bound_;
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace svi
