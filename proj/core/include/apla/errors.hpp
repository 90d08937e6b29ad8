#pragma once

#include <stdexcept>
#include <string>

namespace apla {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller violated a precondition (bad index, malformed input).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Learning or analysis parameters are outside their admissible region.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// The game lacks a structural property an operation requires.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Exhaustive enumeration requested above the configured node cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Configuration file missing, unreadable, or schema-invalid.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace apla
