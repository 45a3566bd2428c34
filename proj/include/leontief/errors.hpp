#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace leontief {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes that do not fit together (non-square, length mismatch).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Values outside the admissible domain (negative coefficient, NaN, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

/// A caller asked for something the inputs do not allow, e.g. a Perron
/// vector of a block whose radius is not 1 or an open analysis with d = 0.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Power iteration ran out of iterations. Carries the last
/// Collatz-Wielandt bracket so callers can report how close it got.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double lower, double upper)
      : Error(what), lower_(lower), upper_(upper) {}
  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }

 private:
  double lower_;
  double upper_;
};

/// A computed quantity disagrees with what the theory guarantees
/// (residual too large, sign flip in a Perron vector, ...).
class ConsistencyError : public Error {
 public:
  ConsistencyError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Malformed input file. Row/column are 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row = 0, std::size_t column = 0)
      : Error(format(what, row, column)), row_(row), column_(column) {}
  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

  static std::string format(const std::string& what, std::size_t row, std::size_t column) {
    if (row == 0) return what;
    std::string s = "line " + std::to_string(row);
    if (column != 0) s += ", column " + std::to_string(column);
    return s + ": " + what;
  }

 private:
  std::size_t row_;
  std::size_t column_;
};

}  // namespace leontief
