#pragma once

#include <stdexcept>
#include <string>

namespace hsi {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands with incompatible shapes or out-of-range indices.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameters (divisibility, unsupported factor, empty sets...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Base class for file format problems.
class FormatError : public Error {
 public:
  using Error::Error;
};

class MalformedHeaderError : public FormatError {
 public:
  using FormatError::FormatError;
};

class TruncatedPayloadError : public FormatError {
 public:
  using FormatError::FormatError;
};

class DimensionOverflowError : public FormatError {
 public:
  using FormatError::FormatError;
};

/// NaN/inf in an iterate, degenerate statistics and similar failures.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace hsi
