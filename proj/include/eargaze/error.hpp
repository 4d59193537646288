#pragma once

#include <stdexcept>
#include <string>

namespace eargaze {

// Error categories map one-to-one onto CLI exit codes.
enum class ErrorCategory { validation = 2, data = 3, internal = 4 };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

/// Bad parameters or configuration: a precondition the caller controls.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorCategory::validation, what) {}
};

/// Input data that cannot be used as given (malformed files, degenerate signals).
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorCategory::data, what) {}
};

/// Raised when a correlation is undefined because one input has zero variance.
class DegenerateError : public DataError {
 public:
  explicit DegenerateError(const std::string& what) : DataError(what) {}
};

const char* category_name(ErrorCategory category) noexcept;

}  // namespace eargaze
