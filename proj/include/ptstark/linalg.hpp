#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "ptstark/errors.hpp"

namespace ptstark {

// Lower-triangular Cholesky factor of a symmetric positive-definite matrix,
// S = L L^T. Throws cholesky_error with the offending pivot index when a
// pivot is not strictly positive (quasi-linear dependence shows up here).
inline Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& s) {
  const Eigen::Index n = s.rows();
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = s(j, j) - l.row(j).head(j).squaredNorm();
    if (!(d > 0.0) || !std::isfinite(d)) throw cholesky_error(int(j), d);
    l(j, j) = std::sqrt(d);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double off = s(i, j) - l.row(i).head(j).dot(l.row(j).head(j));
      l(i, j) = off / l(j, j);
    }
  }
  return l;
}

}  // namespace ptstark
