#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tron {

/// Base class for every error this library raises intentionally.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Vector/matrix length disagreement.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Row or column index outside the matrix extents.
class BoundsError : public Error {
 public:
  using Error::Error;
};

/// Malformed input data; carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Label value outside {-1, 0, +1}.
class UnsupportedLabelError : public ParseError {
 public:
  using ParseError::ParseError;
};

/// An execution strategy was invoked without the state it requires
/// (e.g. a gathered Hessian product without a materialized submatrix).
class StrategyPreconditionError : public Error {
 public:
  using Error::Error;
};

/// Materializing the gathered submatrix would exceed the configured
/// memory budget. The message names the mixed-active-set remedy.
class BudgetExceededError : public Error {
 public:
  BudgetExceededError(std::size_t projected, std::size_t budget)
      : Error("gathered submatrix would need " + std::to_string(projected) +
              " bytes, exceeding the " + std::to_string(budget) +
              "-byte budget; use the mix backend (MixedActiveSet), which "
              "answers Hessian products by index-indirect traversal instead"),
        projected_bytes_(projected),
        budget_bytes_(budget) {}
  std::size_t projected_bytes() const { return projected_bytes_; }
  std::size_t budget_bytes() const { return budget_bytes_; }

 private:
  std::size_t projected_bytes_;
  std::size_t budget_bytes_;
};

}  // namespace tron
