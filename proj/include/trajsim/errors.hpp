#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace trajsim {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. `line()` is 1-based; 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Data that parses but violates a domain invariant (timestamps, dimensions, ids).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Missing, superfluous or out-of-range measure / index / config parameter.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A batch aborted because one pair failed.
class BatchError : public Error {
 public:
  BatchError(std::size_t pair_index, const std::string& what)
      : Error("pair " + std::to_string(pair_index) + ": " + what), pair_index_(pair_index) {}
  std::size_t pair_index() const noexcept { return pair_index_; }

 private:
  std::size_t pair_index_;
};

}  // namespace trajsim
