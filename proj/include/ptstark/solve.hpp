#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "ptstark/errors.hpp"
#include "ptstark/linalg.hpp"
#include "ptstark/slater.hpp"

namespace ptstark {

// Eigenvalues (and optionally eigenvectors) of the pencil at one coupling g,
// sorted by ascending real part, ties broken by ascending imaginary part.
struct Spectrum {
  double g = 0.0;
  Eigen::VectorXcd eigenvalues;
  std::optional<Eigen::MatrixXcd> eigenvectors;  // columns paired to eigenvalues
  std::vector<std::string> labels;               // optional tracking identities
};

// Conditioning diagnostics of the overlap matrix. Quasi-linear dependence of
// the Slater basis drives the condition number up; results are reported, not
// silently regularized.
struct ConditionReport {
  double overlap_condition = 1.0;
  double smallest_pivot = 0.0;
  bool warning = false;
};

inline constexpr double condition_warning_threshold = 1e12;

namespace detail {

inline std::vector<Eigen::Index> sort_permutation(const Eigen::VectorXcd& values) {
  std::vector<Eigen::Index> perm(std::size_t(values.size()));
  std::iota(perm.begin(), perm.end(), Eigen::Index(0));
  std::sort(perm.begin(), perm.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (values[a].real() != values[b].real()) return values[a].real() < values[b].real();
    return values[a].imag() < values[b].imag();
  });
  return perm;
}

// X -> L^-1 X L^-T for lower-triangular L, all real.
inline Eigen::MatrixXd congruence(const Eigen::MatrixXd& l, const Eigen::MatrixXd& x) {
  const Eigen::MatrixXd y = l.triangularView<Eigen::Lower>().solve(x);
  return l.triangularView<Eigen::Lower>().solve(y.transpose()).transpose();
}

}  // namespace detail

// Congruence reduction of (H0 + i g Z) v = E S v to the standard problem
// M w = E w with M = L^-1 (H0 + i g Z) L^-T, S = L L^T. Real and imaginary
// parts are reduced separately, so the parity identity D M D = M* (with
// D = diag((-1)^{l_a})) holds exactly entry by entry, not just to rounding.
// The congruence of a symmetric matrix is symmetric, but the triangular
// solves do not preserve that under ill conditioning, so the exact property
// is restored by symmetrizing - the same treatment the kinetic matrix gets.
inline Eigen::MatrixXcd reduce(const MatrixPencil& pencil, double g) {
  const Eigen::MatrixXd l = cholesky_lower(pencil.S);
  const Eigen::MatrixXd re_raw = detail::congruence(l, pencil.H0);
  const Eigen::MatrixXd im_raw = g * detail::congruence(l, pencil.Z);
  const Eigen::MatrixXd re = 0.5 * (re_raw + re_raw.transpose());
  const Eigen::MatrixXd im = 0.5 * (im_raw + im_raw.transpose());
  Eigen::MatrixXcd m(re.rows(), re.cols());
  m.real() = re;
  m.imag() = im;
  return m;
}

// All eigenvalues of a dense complex matrix, sorted by (Re, Im). Delegates to
// a dense Schur-based solver; non-convergence is reported with the iteration
// budget that was exhausted.
inline Eigen::VectorXcd eigvals(const Eigen::MatrixXcd& m) {
  if (!m.allFinite()) throw std::invalid_argument("eigvals: matrix has non-finite entries");
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw convergence_error("eigvals: dense eigensolver did not converge",
                            int(40 * m.rows()));
  Eigen::VectorXcd values = solver.eigenvalues();
  const auto perm = detail::sort_permutation(values);
  Eigen::VectorXcd sorted(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) sorted[i] = values[perm[std::size_t(i)]];
  return sorted;
}

// Spectrum of (H0 + i g Z) v = E S v. With want_vectors the generalized
// eigenvectors are recovered as v = L^-T w, normalized to unit length, and
// every pair is verified against the residual bound
// ||(H0 + i g Z) v - E S v|| <= 1e-8 ||H0 + i g Z||.
inline Spectrum solve_pencil(const MatrixPencil& pencil, double g, bool want_vectors = false) {
  const Eigen::MatrixXd l = cholesky_lower(pencil.S);
  const Eigen::MatrixXd re = detail::congruence(l, pencil.H0);
  const Eigen::MatrixXd im = g * detail::congruence(l, pencil.Z);
  Eigen::MatrixXcd m(re.rows(), re.cols());
  m.real() = re;
  m.imag() = im;

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, want_vectors);
  if (solver.info() != Eigen::Success)
    throw convergence_error("solve_pencil: dense eigensolver did not converge",
                            int(40 * m.rows()));

  Spectrum spectrum;
  spectrum.g = g;
  Eigen::VectorXcd values = solver.eigenvalues();
  const auto perm = detail::sort_permutation(values);
  spectrum.eigenvalues.resize(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i)
    spectrum.eigenvalues[i] = values[perm[std::size_t(i)]];

  if (want_vectors) {
    const Eigen::MatrixXcd w = solver.eigenvectors();
    Eigen::MatrixXcd v(w.rows(), w.cols());
    for (Eigen::Index i = 0; i < values.size(); ++i) {
      Eigen::VectorXcd column =
          l.transpose().triangularView<Eigen::Upper>().solve(w.col(perm[std::size_t(i)]));
      v.col(i) = column / column.norm();
    }
    Eigen::MatrixXcd a = pencil.H0.cast<std::complex<double>>();
    a.imag() = g * pencil.Z;
    const double scale = a.norm();  // Frobenius
    for (Eigen::Index i = 0; i < values.size(); ++i) {
      const double residual =
          (a * v.col(i) - spectrum.eigenvalues[i] * (pencil.S * v.col(i))).norm();
      if (!(residual <= 1e-8 * scale))
        throw numerical_error("solve_pencil: eigenpair residual " + std::to_string(residual) +
                              " exceeds 1e-8 * ||H0 + igZ|| = " + std::to_string(1e-8 * scale));
    }
    spectrum.eigenvectors = std::move(v);
  }
  return spectrum;
}

// Condition number of S estimated by extremal-eigenvalue power iteration
// (largest eigenvalue directly, smallest via Cholesky-based inverse
// iteration), at most 20 iterations each, stopping at 1e-3 relative change.
inline ConditionReport condition_diagnostics(const MatrixPencil& pencil) {
  ConditionReport report;
  const Eigen::Index n = pencil.S.rows();

  Eigen::MatrixXd l;
  try {
    l = cholesky_lower(pencil.S);
  } catch (const cholesky_error& broken) {
    report.smallest_pivot = broken.pivot_value;
    report.overlap_condition = std::numeric_limits<double>::infinity();
    report.warning = true;
    return report;
  }
  report.smallest_pivot = l.diagonal().minCoeff();

  const Eigen::VectorXd start = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(double(n)));
  const auto extremal = [&](auto&& apply) {
    Eigen::VectorXd v = start;
    double estimate = 0.0;
    for (int iteration = 0; iteration < 20; ++iteration) {
      Eigen::VectorXd next = apply(v);
      const double next_estimate = v.dot(next);
      next.normalize();
      v = next;
      if (iteration > 0 && std::abs(next_estimate - estimate) <= 1e-3 * std::abs(next_estimate)) {
        estimate = next_estimate;
        break;
      }
      estimate = next_estimate;
    }
    return estimate;
  };

  const double largest = extremal([&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return pencil.S * v;
  });
  // Inverse iteration: v -> S^-1 v through the triangular factors; its
  // Rayleigh quotient converges to 1/lambda_min.
  const double inverse_largest = extremal([&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    const Eigen::VectorXd y = l.triangularView<Eigen::Lower>().solve(v);
    return l.transpose().triangularView<Eigen::Upper>().solve(y);
  });

  report.overlap_condition = largest * inverse_largest;
  report.warning = report.overlap_condition > condition_warning_threshold ||
                   report.smallest_pivot <= 0.0;
  return report;
}

}  // namespace ptstark
