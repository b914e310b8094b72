#pragma once

#include <stdexcept>
#include <string>

namespace invms {

/// Error categories shared by the C++ core and the C API status codes.
enum class ErrorKind {
  Domain,       // argument or parameter outside its admissible set
  Parse,        // malformed textual input
  Convergence,  // iterative method did not reach tolerance
  Bracket,      // root finder given an interval without a sign change
  Data,         // input data unusable (too few exceedances, bad CSV, ...)
  Unsupported,  // no theory available for this configuration
  State,        // object used before it holds the required data
  Boundary,     // evaluation on a spectral-atom ray
  Numeric,      // any other numerical breakdown
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& w) : Error(ErrorKind::Domain, w) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& w) : Error(ErrorKind::Parse, w) {}
};

/// Carries the best estimate reached before giving up.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& w, double best, double err_estimate)
      : Error(ErrorKind::Convergence, w), best_(best), err_(err_estimate) {}
  double best_estimate() const noexcept { return best_; }
  double error_estimate() const noexcept { return err_; }

 private:
  double best_;
  double err_;
};

class BracketError : public Error {
 public:
  explicit BracketError(const std::string& w) : Error(ErrorKind::Bracket, w) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& w) : Error(ErrorKind::Data, w) {}
};

class UnsupportedError : public Error {
 public:
  explicit UnsupportedError(const std::string& w)
      : Error(ErrorKind::Unsupported, w) {}
};

class StateError : public Error {
 public:
  explicit StateError(const std::string& w) : Error(ErrorKind::State, w) {}
};

class BoundaryError : public Error {
 public:
  explicit BoundaryError(const std::string& w)
      : Error(ErrorKind::Boundary, w) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& w) : Error(ErrorKind::Numeric, w) {}
};

}  // namespace invms
