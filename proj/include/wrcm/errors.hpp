#pragma once

#include <stdexcept>
#include <string>

namespace wrcm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model, process or experiment parameter is outside its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A function argument lies outside the function's domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A vertex index or block index is not present in a configuration.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Quadrature or fitting did not reach the requested accuracy.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

/// Malformed input file (CSV schema, JSON document).
class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace wrcm
