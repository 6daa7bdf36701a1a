#pragma once

#include <stdexcept>
#include <string>

namespace ptstark {

// Failure of a numerical procedure (factorization breakdown, iteration not
// converging, basin escape of a root finder). Carries enough context to
// diagnose the run without a debugger.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

// Cholesky factorization hit a non-positive pivot: the overlap matrix is not
// numerically positive definite (quasi-linear dependence of the basis).
class cholesky_error : public numerical_error {
 public:
  cholesky_error(int pivot_index, double pivot_value)
      : numerical_error("cholesky breakdown at pivot " + std::to_string(pivot_index) +
                        " (value " + std::to_string(pivot_value) + ")"),
        pivot_index(pivot_index),
        pivot_value(pivot_value) {}

  int pivot_index;
  double pivot_value;
};

// Iterative eigensolver or root finder exceeded its iteration budget.
class convergence_error : public numerical_error {
 public:
  convergence_error(const std::string& what, int iterations)
      : numerical_error(what + " (after " + std::to_string(iterations) + " iterations)"),
        iterations(iterations) {}

  int iterations;
};

}  // namespace ptstark
