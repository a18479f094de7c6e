#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace phasekit {

// Base class for everything thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mismatched grid shapes, pattern counts, or vector lengths.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Invalid parameter values (beta range, mask shifts, config files, flags).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// <x, x0> = 0 in unit-phase alignment; the optimal phase is undefined.
class DegenerateAlignmentError : public Error {
 public:
  using Error::Error;
};

// Reference image with zero norm.
class InvalidReferenceError : public Error {
 public:
  using Error::Error;
};

// Data that violates a precondition (negative or all-zero magnitudes).
class InvalidDataError : public Error {
 public:
  using Error::Error;
};

// Problem too large for the requested dense code path, or a scale factor
// that leaves the representable range.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// |A x0| has (near-)zero entries, so the linearization at x0 is undefined.
class DegenerateSolutionError : public Error {
 public:
  using Error::Error;
};

// Malformed input file; byte_offset() points at the offending position.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t byte_offset)
      : Error(what), byte_offset_(byte_offset) {}
  std::size_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

// Recognized but unsupported file flavor (color maps, 16-bit binary data).
class UnsupportedFormatError : public Error {
 public:
  using Error::Error;
};

// Filesystem failures, annotated with the path.
class IoError : public Error {
 public:
  using Error::Error;
};

// An iteration hit its cap before meeting its convergence criterion.
// Carries the best estimate reached so far.
class ToleranceNotReachedError : public Error {
 public:
  ToleranceNotReachedError(const std::string& what, double best_estimate)
      : Error(what), best_estimate_(best_estimate) {}
  double best_estimate() const noexcept { return best_estimate_; }

 private:
  double best_estimate_;
};

}  // namespace phasekit
