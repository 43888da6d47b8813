#pragma once

#include <stdexcept>
#include <string>

namespace epc {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A scalar fell outside its admissible domain (e.g. a value outside [0,1]).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A construction has no real solution: unreachable anchor, disjoint ellipses.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Two ellipses with coincident centers were asked to intersect.
class DegenerateInputError : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

/// A graph could not be mapped back to an n-D point.
class InversionError : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

/// Malformed or inconsistent input data (CSV, splits, datasets).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent configuration: layouts, mining parameters, fingerprints.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

}  // namespace epc
