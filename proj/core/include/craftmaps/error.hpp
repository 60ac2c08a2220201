#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace craftmaps {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(const std::string& what, std::size_t expected, std::size_t got)
      : Error(what + ": expected dimension " + std::to_string(expected) + ", got " +
              std::to_string(got)),
        expected_(expected),
        got_(got) {}

  std::size_t expected() const { return expected_; }
  std::size_t got() const { return got_; }

 private:
  std::size_t expected_;
  std::size_t got_;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Bad magic, unsupported version or truncated model container.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace craftmaps
