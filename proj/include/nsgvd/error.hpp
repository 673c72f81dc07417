#pragma once

#include <stdexcept>
#include <string>

namespace nsgvd {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or violated precondition on caller-supplied values.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Problems with input data: missing files, shape mismatches, bad records.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Malformed tensor or checkpoint file. `kind` distinguishes the failure.
class FormatError : public DataError {
 public:
  enum class Kind { kIo, kBadMagic, kUnsupportedVersion, kTruncated, kLengthMismatch };

  FormatError(Kind kind, const std::string& what) : DataError(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// A denominator fell below its configured floor where no fallback exists.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Theorem-check constants that do not satisfy the admissibility conditions.
class AdmissibilityError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace nsgvd
