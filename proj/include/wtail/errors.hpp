#pragma once

#include <stdexcept>
#include <string>

namespace wtail {

// Argument outside the mathematical domain of an operation, or invalid data.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A numerical procedure (quadrature, root finding) failed to meet its tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// F^{-1}(1 - e^{-x}) cannot be resolved in double precision.
class SaturationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// b(log n) = 0: no finite optimal rate for k.
class UndefinedRateError : public DomainError {
 public:
  using DomainError::DomainError;
};

// The bias function changes sign on the probed range.
class IndeterminateSignError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Malformed input data; carries the 1-based line number when known.
class ParseError : public DomainError {
 public:
  ParseError(const std::string& what, long line)
      : DomainError(what), line_(line) {}
  long line() const noexcept { return line_; }

 private:
  long line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wtail
