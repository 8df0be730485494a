#pragma once

#include <stdexcept>
#include <string>

namespace ots {

// Base class for every failure this library reports.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text (case files, training files, configs).
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_ = 0;
};

// Input that parses but names a feature this toolkit does not model.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// A network or instance that violates a structural requirement.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Numerical breakdown or resource exhaustion inside a solver.
class SolveError : public Error {
 public:
  using Error::Error;
};

// File-system failure while reading or writing artifacts.
class IoError : public Error {
 public:
  using Error::Error;
};

// Caller passed an argument outside an operation's contract.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace ots
