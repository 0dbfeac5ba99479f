#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace nmq {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A matrix that must be Hurwitz has an eigenvalue at or right of the margin.
class NotHurwitzError : public Error {
 public:
  NotHurwitzError(const std::string& what, std::complex<double> eigenvalue)
      : Error(what), eigenvalue_(eigenvalue) {}

  std::complex<double> eigenvalue() const noexcept { return eigenvalue_; }
  double spectral_abscissa() const noexcept { return eigenvalue_.real(); }

 private:
  std::complex<double> eigenvalue_;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

/// Malformed input document; carries the offending field path.
class ParseError : public Error {
 public:
  ParseError(const std::string& field, const std::string& message)
      : Error(field + ": " + message), field_(field) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class InfeasibleError : public Error {
 public:
  using Error::Error;
};

}  // namespace nmq
