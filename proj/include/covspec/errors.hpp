#pragma once

#include <stdexcept>
#include <string>

namespace covspec {

// Bad inputs: config fields, dimension mismatches, violated preconditions.
// The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Iterative solvers that fail to reach their tolerance. Exit code 3.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& msg, double residual)
      : std::runtime_error(msg), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// Violation of an internal structural invariant (enumeration bookkeeping,
// category inequalities). Indicates a bug, not bad input.
class InvariantError : public std::logic_error {
 public:
  explicit InvariantError(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace covspec
