#pragma once

#include <stdexcept>
#include <string>

namespace trajstitch {

// Base for every error raised by the library. The CLI maps ConfigError and
// its subclasses to exit code 1, everything else to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid user-facing configuration or precondition.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input record. Carries the 1-based line number.
class ParseError : public ConfigError {
 public:
  ParseError(int line, const std::string& what)
      : ConfigError("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Well-formed input that violates a structural invariant.
class SchemaError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Tensor shapes that do not compose.
class ShapeError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Non-finite loss or gradient during optimization.
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace trajstitch
