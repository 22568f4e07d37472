#pragma once

#include <stdexcept>
#include <string>

namespace mcov {

/// Bad user-supplied configuration: out-of-range parameters, violated
/// preconditions such as n <= 2*b_n. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure: non-positive-definite matrix where one is required,
/// eigensolver non-convergence, non-finite results. Maps to CLI exit code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// File-level failure: missing file, malformed row, ragged rows, non-finite
/// entries in input data. Maps to CLI exit code 4.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mcov
