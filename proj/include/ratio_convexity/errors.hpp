#pragma once

#include <stdexcept>
#include <string>

namespace ratio_convexity {

/// Caller supplied something malformed: wrong dimension, non-finite input,
/// an empty grid, a bad flag. The CLI maps this to exit code 2.
class UsageError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// CSV ingestion failure. Carries the 1-based line (and column when known).
class ParseError : public UsageError {
  public:
    ParseError(const std::string& what, std::size_t row, std::size_t column = 0)
        : UsageError(what), row_(row), column_(column) {}

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

  private:
    std::size_t row_;
    std::size_t column_;
};

/// Numerical failure. The CLI maps this family to exit code 3.
class NumericError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A Custom log-density returned NaN or an infinity.
class ModelContractError : public NumericError {
  public:
    using NumericError::NumericError;
};

/// Sample with zero spread or a singular covariance estimate.
class DegenerateSampleError : public NumericError {
  public:
    using NumericError::NumericError;
};

/// The concavity scan exhausted its grid expansions without a witness.
class InconclusiveError : public NumericError {
  public:
    using NumericError::NumericError;
};

}  // namespace ratio_convexity
