#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fluxpair {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user input: parameters out of range, malformed circuit, bad call arguments.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// The capacitance matrix is singular or non-positive-definite; carries the
/// offending null direction for diagnosis (a floating charge combination).
class SingularMatrixError : public Error {
 public:
  SingularMatrixError(const std::string& what, std::vector<double> null_direction)
      : Error(what), null_direction_(std::move(null_direction)) {}
  const std::vector<double>& null_direction() const { return null_direction_; }

 private:
  std::vector<double> null_direction_;
};

/// Requested basis would exceed the configured dimension budget.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Iterative eigensolver ran out of its matvec budget; carries the best
/// residual norms reached so the caller can report how close it got.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, std::vector<double> residuals, long matvecs)
      : Error(what), residuals_(std::move(residuals)), matvecs_(matvecs) {}
  const std::vector<double>& residuals() const { return residuals_; }
  long matvecs() const { return matvecs_; }

 private:
  std::vector<double> residuals_;
  long matvecs_;
};

/// The low-energy subspace no longer matches the product basis: the smallest
/// singular value of the overlap matrix fell below the configured threshold,
/// so a perturbative two-qubit reading of the spectrum is meaningless.
class HybridizationError : public Error {
 public:
  HybridizationError(const std::string& what, double min_singular)
      : Error(what), min_singular_(min_singular) {}
  double min_singular() const { return min_singular_; }

 private:
  double min_singular_;
};

/// Config file could not be parsed; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line) : Error(what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace fluxpair
