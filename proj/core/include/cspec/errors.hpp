#pragma once

#include <stdexcept>
#include <string>

namespace cspec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unknown vertex, edge or crystal element.
class LookupError : public Error {
 public:
  using Error::Error;
};

/// Cochains or matrices whose dimensions do not match the graph they are used with.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A descriptor or profile violates one of its invariants. `field()` names the offender.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class CatalogError : public Error {
 public:
  using Error::Error;
};

/// Support of a cochain escapes the evaluation window of a truncated computation.
class WindowError : public Error {
 public:
  using Error::Error;
};

/// Eigensolver failure or non-convergence.
class NumericError : public Error {
 public:
  using Error::Error;
};

class ConfigurationError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

}  // namespace cspec
