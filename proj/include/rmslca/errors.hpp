#pragma once

#include <stdexcept>
#include <string>

namespace rmslca {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

class DegenerateConstant : public Error {
 public:
  using Error::Error;
};

class EmptySubset : public Error {
 public:
  using Error::Error;
};

class TooManySubsets : public Error {
 public:
  using Error::Error;
};

class SingularAllSubsets : public Error {
 public:
  using Error::Error;
};

class SingularScatter : public Error {
 public:
  using Error::Error;
};

class MissingConstants : public Error {
 public:
  using Error::Error;
};

class AssumptionViolated : public Error {
 public:
  using Error::Error;
};

class DegenerateSpectrum : public Error {
 public:
  using Error::Error;
};

class NotNullHypothesis : public Error {
 public:
  using Error::Error;
};

/// CSV ingestion failure; carries the 1-based row/column of the offending cell
/// (0 when not applicable).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row = 0, std::size_t col = 0)
      : Error(what), row_(row), col_(col) {}
  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

class MissingColumn : public ParseError {
 public:
  using ParseError::ParseError;
};

class NonNumericCell : public ParseError {
 public:
  using ParseError::ParseError;
};

}  // namespace rmslca
