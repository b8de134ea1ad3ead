#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace uttlab {

/// Base class for every error raised by the library. `what()` always names
/// the offending entity (file, line, label, id) so the CLI can print it as-is.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& msg)
      : Error(source + ":" + std::to_string(line) + ": " + msg), line_(line) {}
  explicit ParseError(const std::string& msg) : Error(msg) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_ = 0;
};

/// Precondition or invariant violation on otherwise well-formed data.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure inside a learner (e.g. line search could not make progress).
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace uttlab
