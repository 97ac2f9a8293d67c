#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fineq {

// Bad user input: malformed expression, out-of-range parameter, wrong role.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SyntaxError : public InvalidInput {
 public:
  SyntaxError(const std::string& what, std::size_t position)
      : InvalidInput(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

// Integration or solver breakdown (overflow, step underflow, no convergence).
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fineq
