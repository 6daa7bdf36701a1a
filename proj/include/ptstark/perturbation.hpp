#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "ptstark/linalg.hpp"
#include "ptstark/slater.hpp"
#include "ptstark/solve.hpp"

namespace ptstark {

// Parabolic quantum numbers of a hydrogen Stark state: principal number
// n = n1 + n2 + |m| + 1 and electric number q = n1 - n2.
struct ParabolicLabel {
  int n1 = 0;
  int n2 = 0;
  int m = 0;

  int n() const { return n1 + n2 + std::abs(m) + 1; }
  int q() const { return n1 - n2; }
};

inline void validate(const ParabolicLabel& label) {
  if (label.n1 < 0 || label.n2 < 0)
    throw std::invalid_argument("ParabolicLabel: n1 and n2 must be >= 0");
}

enum class PerturbationVerdict { complex_for_small_g, inconclusive };

// First-order degenerate perturbation theory on one degenerate eigenspace of
// H0: the eigenvalues w of the z-submatrix give corrections i g w, so any
// nonzero w makes the energy complex for arbitrarily small g.
struct PerturbationReport {
  std::vector<std::string> subspace;
  double unperturbed_energy = 0.0;
  Eigen::MatrixXd z_submatrix;
  std::vector<double> first_order;  // eigenvalues of z_submatrix, ascending
  PerturbationVerdict verdict = PerturbationVerdict::inconclusive;
};

// Cluster the (real) g = 0 spectrum into degenerate groups: indices i, j land
// in one group when |E_i - E_j| <= tol * max(1, |E_i|) chains transitively.
// The spectrum is sorted, so groups are contiguous index ranges.
inline std::vector<std::vector<int>> degenerate_subspaces(const Spectrum& spectrum_at_zero,
                                                          double tol = 1e-6) {
  if (tol < 0.0) throw std::invalid_argument("degenerate_subspaces: tol must be >= 0");
  std::vector<std::vector<int>> groups;
  const Eigen::Index dim = spectrum_at_zero.eigenvalues.size();
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double e = spectrum_at_zero.eigenvalues[i].real();
    if (!groups.empty()) {
      const double prev = spectrum_at_zero.eigenvalues[i - 1].real();
      if (std::abs(e - prev) <= tol * std::max(1.0, std::abs(e))) {
        groups.back().push_back(int(i));
        continue;
      }
    }
    groups.push_back({int(i)});
  }
  return groups;
}

// S-orthonormal real eigenvectors of the g = 0 pencil for one degenerate
// group. Solving the reduced real-symmetric problem gives exactly orthonormal
// w even inside degenerate clusters; v = L^-T w then satisfies v^T S v = 1.
inline Eigen::MatrixXd degenerate_group_vectors(const MatrixPencil& pencil,
                                                const std::vector<int>& group) {
  const Eigen::MatrixXd l = cholesky_lower(pencil.S);
  const Eigen::MatrixXd m = detail::congruence(l, pencil.H0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (m + m.transpose()));
  if (solver.info() != Eigen::Success)
    throw convergence_error("degenerate_group_vectors: eigensolver did not converge",
                            int(30 * m.rows()));
  Eigen::MatrixXd vectors(pencil.dim(), Eigen::Index(group.size()));
  for (std::size_t c = 0; c < group.size(); ++c) {
    if (group[c] < 0 || group[c] >= int(pencil.dim()))
      throw std::invalid_argument("degenerate_group_vectors: index out of range");
    vectors.col(Eigen::Index(c)) = l.transpose().triangularView<Eigen::Upper>().solve(
        solver.eigenvectors().col(group[c]));
  }
  return vectors;
}

// Build and diagonalize the z-submatrix z[a,b] = v_a^T Z v_b on a degenerate
// group. Inputs must be S-orthonormal (Gram deviation <= 1e-8); the verdict
// is complex-for-small-g as soon as some |w| exceeds the tolerance.
inline PerturbationReport first_order_corrections(const MatrixPencil& pencil,
                                                  const std::vector<int>& group,
                                                  const Eigen::MatrixXd& vectors,
                                                  double tol = 1e-8) {
  if (vectors.cols() != Eigen::Index(group.size()) || vectors.rows() != pencil.dim())
    throw std::invalid_argument("first_order_corrections: vectors shape mismatch");
  const Eigen::MatrixXd gram = vectors.transpose() * pencil.S * vectors;
  const double gram_deviation =
      (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  if (gram_deviation > 1e-8)
    throw std::invalid_argument("first_order_corrections: vectors are not S-orthonormal "
                                "(Gram deviation " + std::to_string(gram_deviation) + ")");

  PerturbationReport report;
  for (int index : group) report.subspace.push_back("state " + std::to_string(index));
  report.unperturbed_energy =
      (vectors.transpose() * pencil.H0 * vectors).diagonal().mean();
  Eigen::MatrixXd z = vectors.transpose() * pencil.Z * vectors;
  report.z_submatrix = 0.5 * (z + z.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(report.z_submatrix);
  if (solver.info() != Eigen::Success)
    throw convergence_error("first_order_corrections: eigensolver did not converge",
                            int(30 * z.rows()));
  report.first_order.assign(solver.eigenvalues().data(),
                            solver.eigenvalues().data() + solver.eigenvalues().size());
  const double largest = report.first_order.empty()
                             ? 0.0
                             : std::max(std::abs(report.first_order.front()),
                                        std::abs(report.first_order.back()));
  report.verdict = largest > tol ? PerturbationVerdict::complex_for_small_g
                                 : PerturbationVerdict::inconclusive;
  return report;
}

// First-order linear-Stark coefficient of hydrogen state (n, q): the energy
// series starts E = -1/(2n^2) + lambda (3/2) n q + ..., so with lambda = i g
// any q != 0 state turns complex immediately.
inline double hydrogen_first_order(const ParabolicLabel& label) {
  validate(label);
  return 1.5 * double(label.n()) * double(label.q());
}

// Cross-m assembly of the full hydrogen shell-n subspace. z conserves m, so
// the n^2-dimensional z-submatrix is block diagonal over m = -(n-1)..(n-1);
// each block is computed from a fixed-m Slater pencil that contains the
// exact shell states (alpha = 1/n, powers up to n-1 per l). For n = 2 the
// assembled first_order multiset is the textbook {-3, 0, 0, 3}.
inline PerturbationReport hydrogen_shell_report(int n, double tol = 1e-8) {
  if (n < 1) throw std::invalid_argument("hydrogen_shell_report: n must be >= 1");
  const double shell_energy = -0.5 / (double(n) * double(n));

  PerturbationReport assembled;
  assembled.unperturbed_energy = shell_energy;
  std::vector<Eigen::MatrixXd> blocks;
  Eigen::Index total = 0;

  for (int m = -(n - 1); m <= n - 1; ++m) {
    BasisSpec basis{1.0 / double(n), m, n - 1, n};
    const MatrixPencil pencil = build_pencil(basis, PotentialKind::coulomb);
    const Spectrum spectrum = solve_pencil(pencil, 0.0);

    // Select the degenerate group holding the exact shell energy.
    const auto groups = degenerate_subspaces(spectrum, 1e-6);
    const std::vector<int>* shell_group = nullptr;
    for (const auto& group : groups)
      for (int index : group)
        if (std::abs(spectrum.eigenvalues[index].real() - shell_energy) <
            1e-8 * std::max(1.0, std::abs(shell_energy)))
          shell_group = &group;
    if (shell_group == nullptr || int(shell_group->size()) != n - std::abs(m))
      throw numerical_error("hydrogen_shell_report: shell group not resolved for m = " +
                            std::to_string(m));

    const Eigen::MatrixXd vectors = degenerate_group_vectors(pencil, *shell_group);
    const PerturbationReport block = first_order_corrections(pencil, *shell_group, vectors, tol);
    for (std::size_t k = 0; k < block.first_order.size(); ++k) {
      assembled.subspace.push_back("m=" + std::to_string(m) + " state " + std::to_string(k));
      assembled.first_order.push_back(block.first_order[k]);
    }
    blocks.push_back(block.z_submatrix);
    total += block.z_submatrix.rows();
  }

  assembled.z_submatrix = Eigen::MatrixXd::Zero(total, total);
  Eigen::Index offset = 0;
  for (const auto& block : blocks) {
    assembled.z_submatrix.block(offset, offset, block.rows(), block.cols()) = block;
    offset += block.rows();
  }
  std::sort(assembled.first_order.begin(), assembled.first_order.end());
  const double largest = std::max(std::abs(assembled.first_order.front()),
                                  std::abs(assembled.first_order.back()));
  assembled.verdict = largest > tol ? PerturbationVerdict::complex_for_small_g
                                    : PerturbationVerdict::inconclusive;
  return assembled;
}

}  // namespace ptstark
