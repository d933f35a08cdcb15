#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace salvage {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `position()` is a 0-based byte offset.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Evaluation outside a function's domain, or a math-domain violation
/// (log/sqrt of a negative, division by zero, non-finite result).
class EvalError : public Error {
 public:
  using Error::Error;
};

/// Quadrature or root finding failed to converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Link function is unusable (not injective, image escapes X+, ...).
class LinkError : public Error {
 public:
  using Error::Error;
};

/// Measure dominance does not hold where a construction requires it.
class DominanceError : public Error {
 public:
  using Error::Error;
};

/// Problem file or command-line configuration is invalid.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace salvage
