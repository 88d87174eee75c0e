#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stabx {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. `line()` is the 1-based physical line where the
// offending record starts (0 when unknown).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A domain invariant or operation precondition was violated.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// An iterative solver stopped before meeting its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double duality_gap)
      : Error(what), duality_gap_(duality_gap) {}
  double duality_gap() const { return duality_gap_; }

 private:
  double duality_gap_;
};

}  // namespace stabx
