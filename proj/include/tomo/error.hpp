#pragma once

#include <stdexcept>
#include <string>

namespace tomo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operators, symbols or schemes of incompatible dimension were combined.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the domain of the operation (bad quantum numbers,
/// degenerate directions, non-finite input, too-coarse grids, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A symbol or kernel was used with a scheme it does not belong to.
class SchemeMismatch : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure did not reach its requested accuracy.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace tomo
