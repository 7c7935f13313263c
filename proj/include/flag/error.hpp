#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace flag {

/// Raised when a caller-supplied argument violates an operation's precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an iterative numerical routine fails to converge.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, std::size_t index)
      : std::runtime_error(what + " (index " + std::to_string(index) + ")"),
        index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Raised when an internal invariant is broken beyond rounding tolerance.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace flag
