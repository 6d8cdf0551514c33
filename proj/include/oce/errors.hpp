#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace oce {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the set where the requested quantity is defined
/// (a disutility evaluated off its validity domain, a probability outside
/// (0, 1), a loss above its declared bound, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Reading or writing a file failed.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A text input could not be parsed; `line()` is 1-based, 0 when unknown.
class ParseError : public IoError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : IoError(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace oce
