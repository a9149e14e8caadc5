#pragma once

#include <stdexcept>
#include <string>

namespace qwalk {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad argument or precondition violation (dimension mismatch, zero spin, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed coin/state document. The message names the offending field.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Matrix failed the unitarity check.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, double deviation)
      : Error(what), deviation_(deviation) {}
  double deviation() const noexcept { return deviation_; }

 private:
  double deviation_;
};

/// Matrix size disagrees with the declared dimension.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A size guard rejected the request.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Eigen-solver or SVD did not converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// An internal cross-check disagreed with a proven statement.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace qwalk
