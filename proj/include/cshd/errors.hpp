#pragma once

#include <stdexcept>
#include <string>

namespace cshd {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree (e.g. Hadamard product of 2x3 and 3x2).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A scalar or structural parameter is outside its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// An objective evaluation failed or produced a non-finite value.
class StencilError : public Error {
 public:
  StencilError(const std::string& what, std::string point)
      : Error(what + " at point (" + point + ")"), point_(std::move(point)) {}

  const std::string& point() const noexcept { return point_; }

 private:
  std::string point_;
};

/// The hypotheses of the diagonal-Hessian error bound do not hold.
class BoundInapplicableError : public Error {
 public:
  using Error::Error;
};

}  // namespace cshd
