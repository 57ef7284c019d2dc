#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace triarb {

// Base of every error caused by bad input (files, configs, arguments).
// The CLI maps these to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class OrderingError : public Error {
 public:
  using Error::Error;
};

class EmptySeriesError : public Error {
 public:
  using Error::Error;
};

class AlignmentError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// No trades above the threshold, so no break-even probability exists.
class UndefinedBreakEvenError : public Error {
 public:
  using Error::Error;
};

}  // namespace triarb
