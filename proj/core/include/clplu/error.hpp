#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace clplu {

/// Malformed or inconsistent input data (files, matrices, schemes).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parse failure tied to a location in a text source.
class ParseError : public DataError {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : DataError(source + ":" + std::to_string(line) + ": " + what), source_(source), line_(line) {}

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

/// Invalid user configuration (bad hyperparameters, PLU counts, flags).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Training produced a non-finite loss or gradient.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace clplu
