#pragma once

#include <stdexcept>
#include <string>

namespace unate {

/// Raised when an operation needs |f^{-1}(1)| >= 1 (SAMP, relative distance, biases).
class EmptyFunctionError : public std::runtime_error {
 public:
  explicit EmptyFunctionError(const std::string& what) : std::runtime_error(what) {}
};

class DimensionMismatchError : public std::invalid_argument {
 public:
  DimensionMismatchError(int expected, int actual)
      : std::invalid_argument("dimension mismatch: expected " + std::to_string(expected) +
                              ", got " + std::to_string(actual)) {}
};

class PreconditionError : public std::invalid_argument {
 public:
  explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace unate
