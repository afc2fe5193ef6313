#pragma once

#include <stdexcept>
#include <string>

namespace qtraffic {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters: circuit width, register shape, probabilities, ...
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed input text. `what()` carries "source:line: reason".
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& reason)
      : Error(source + ":" + std::to_string(line) + ": " + reason), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A slice's must-link pairs cannot be packed into the cores.
class Infeasible : public Error {
 public:
  using Error::Error;
};

/// A per-point deadline expired while mapping.
class Timeout : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace qtraffic
