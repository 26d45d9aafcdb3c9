#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sfrl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input values (negative mass, bad normalization, NaN, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Mismatched alphabets, axis out of range, wrong dimensionality.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver hit its iteration limit before certifying its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_value, double last_gap)
      : Error(what), last_value_(last_value), last_gap_(last_gap) {}
  double last_value() const { return last_value_; }
  double last_gap() const { return last_gap_; }

 private:
  double last_value_;
  double last_gap_;
};

/// A target cannot be met: distortion below the feasible minimum, or no convex
/// combination dominating a target vector.
class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& what, std::ptrdiff_t coordinate = -1)
      : Error(what), coordinate_(coordinate) {}
  /// Violated coordinate for mixing problems, -1 when not applicable.
  std::ptrdiff_t coordinate() const { return coordinate_; }

 private:
  std::ptrdiff_t coordinate_;
};

/// A Poisson codebook scan would need more points than its cap allows.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// Caller violated an operation precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A bit stream ended early or does not contain a valid codeword.
class FramingError : public Error {
 public:
  FramingError(const std::string& what, std::size_t position)
      : Error(what + " (bit position " + std::to_string(position) + ")"), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Value outside the domain of a code (zero-mass symbol, k out of range).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A code design step failed (e.g. the candidate budget was too small).
class DesignError : public Error {
 public:
  using Error::Error;
};

}  // namespace sfrl
