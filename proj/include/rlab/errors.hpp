#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rlab {

/// Malformed polynomial text. `position` is the byte offset of the failure.
class ParseError : public std::invalid_argument {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::invalid_argument(what + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Arguments of incompatible shape (dimension, degree, index range).
class DimensionError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A mathematical precondition of the requested computation does not hold
/// (zeros at infinity, singular Jacobian, non-transversal curve, ...).
class PreconditionError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerical procedure gave up (path tracking budget, root polishing).
class NumericalFailure : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rlab
