#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ptstark/errors.hpp"
#include "ptstark/perturbation.hpp"
#include "ptstark/solve.hpp"

namespace ptstark {

// One converged hydrogen Stark state E(g) for a parabolic label, together
// with the separation constants. On success |z1 + z2 - 1| = residual stays
// below 1e-10; at g = 0 the energy is -1/(2 n^2) exactly (to rounding).
struct SeparationState {
  ParabolicLabel label;
  double g = 0.0;
  std::complex<double> energy;
  std::complex<double> z1;
  std::complex<double> z2;
  double residual = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  std::string failure;  // empty on success; short diagnostic otherwise
};

// The channel representation needs harmonic confinement Re(-2E) > 0; below
// this floor the Laguerre basis has collapsed and a root of the quantization
// condition no longer represents a bound-state energy.
inline constexpr double min_confinement = 2.5e-3;  // -2 Re E >= (0.05)^2

// The half-line channel operator obtained from the squared-parabolic
// substitution xi = u^2 (and eta likewise):
//   -F'' + [ (m^2 - 1/4)/u^2 - 2E u^2 + sign * (i g) u^4 ] F = 4 Z F.
// It is represented in the generalized-Laguerre oscillator basis
// u^(|m|+1/2) L_k^(|m|)(w u^2) e^(-w u^2 / 2) with frequency w.
struct ChannelOperator {
  int m = 0;
  std::complex<double> E;
  double g = 0.0;
  int sign = +1;
  int basis_size = 40;
  double basis_frequency = 1.0;
};

inline void validate(const ChannelOperator& op) {
  if (op.basis_size < 10) throw std::invalid_argument("ChannelOperator: basis_size must be >= 10");
  if (!(op.basis_frequency > 0.0))
    throw std::invalid_argument("ChannelOperator: basis_frequency must be > 0");
  if (op.sign != +1 && op.sign != -1)
    throw std::invalid_argument("ChannelOperator: sign must be +1 or -1");
}

namespace detail {

// Matrix of u^2 in the Laguerre oscillator basis: tridiagonal with
// <k|u^2|k> = (2k + a + 1)/w and <k+1|u^2|k> = -sqrt((k+1)(k+a+1))/w.
inline Eigen::MatrixXd u2_matrix(int n, int a, double w) {
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    u(k, k) = double(2 * k + a + 1) / w;
    if (k + 1 < n) {
      const double off = -std::sqrt(double(k + 1) * double(k + a + 1)) / w;
      u(k + 1, k) = off;
      u(k, k + 1) = off;
    }
  }
  return u;
}

// Dense matrix of the channel operator. The kinetic plus centrifugal part is
// written as the w-oscillator minus w^2 u^2, so its matrix is the diagonal
// 2w(2k + a + 1) minus w^2 U2; u^4 = (u^2)^2 is evaluated two rows larger
// and truncated, which is exact for the retained block.
inline Eigen::MatrixXcd channel_matrix(const ChannelOperator& op) {
  const int n = op.basis_size;
  const int a = std::abs(op.m);
  const double w = op.basis_frequency;
  const Eigen::MatrixXd u2 = u2_matrix(n, a, w);
  const Eigen::MatrixXd u2_big = u2_matrix(n + 2, a, w);
  const Eigen::MatrixXd u4 = (u2_big * u2_big).topLeftCorner(n, n);

  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
  for (int k = 0; k < n; ++k) h(k, k) = 2.0 * w * double(2 * k + a + 1);
  h += (-2.0 * op.E - w * w) * u2.cast<std::complex<double>>();
  h += std::complex<double>(0.0, double(op.sign) * op.g) * u4.cast<std::complex<double>>();
  return h;
}

// All channel eigenvalues divided by 4 (the separation constants), sorted by
// (Re, Im).
inline Eigen::VectorXcd channel_spectrum(const ChannelOperator& op) {
  validate(op);
  return eigvals(channel_matrix(op)) / 4.0;
}

inline std::complex<double> pick_tracked(const Eigen::VectorXcd& zs, int k,
                                         std::optional<std::complex<double>> previous) {
  if (!previous) return zs[k];
  Eigen::Index best = 0;
  double best_distance = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < zs.size(); ++i) {
    const double distance = std::abs(zs[i] - *previous);
    if (distance < best_distance) {
      best_distance = distance;
      best = i;
    }
  }
  return zs[best];
}

inline double channel_frequency(std::complex<double> e) {
  // Harmonic confinement -2E u^2 fixes the natural basis frequency; the tiny
  // floor only keeps the matrix finite when an iterate strays to Re E >= 0
  // (the solve then fails honestly through the residual).
  return std::sqrt(std::max(-2.0 * e.real(), 1e-12));
}

}  // namespace detail

// k-th separation constant of the channel operator. At small g the channel
// spectrum is ordered by ascending real part and k indexes it directly; for
// continuity tracking across a parameter sweep pass the previous value. At
// g = 0 the closed form Z = sqrt(-2E) (2k + |m| + 1)/2 holds.
inline std::complex<double> channel_eigenvalue(const ChannelOperator& op, int k,
                                               std::optional<std::complex<double>> previous = {}) {
  validate(op);
  if (k < 0 || k >= op.basis_size)
    throw std::invalid_argument("channel_eigenvalue: k out of range");
  return detail::pick_tracked(detail::channel_spectrum(op), k, previous);
}

// Z1(E; n1, m, +) + Z2(E; n2, m, -) - 1: the separation constraint whose
// roots are the hydrogen Stark energies (unit nuclear charge).
inline std::complex<double> quantization_residual(const ParabolicLabel& label,
                                                  std::complex<double> e, double g,
                                                  int basis_size = 40) {
  validate(label);
  const double w = detail::channel_frequency(e);
  const std::complex<double> z1 =
      channel_eigenvalue({label.m, e, g, +1, basis_size, w}, label.n1);
  const std::complex<double> z2 =
      channel_eigenvalue({label.m, e, g, -1, basis_size, w}, label.n2);
  return z1 + z2 - 1.0;
}

namespace detail {

// Secant iteration on the complex quantization residual, with continuity
// tracking of both channel eigenvalues across iterates. Never throws for
// ordinary non-convergence; the caller decides how to report it.
inline SeparationState try_solve_state(const ParabolicLabel& label, double g,
                                       std::optional<std::complex<double>> initial,
                                       int basis_size) {
  validate(label);
  SeparationState state;
  state.label = label;
  state.g = g;

  const int n = label.n();
  const std::complex<double> seed =
      initial.value_or(std::complex<double>(-0.5 / double(n * n), hydrogen_first_order(label) * g));
  const double escape_radius = 10.0 * std::abs(seed);

  std::optional<std::complex<double>> prev1, prev2;
  const auto residual_at = [&](std::complex<double> e) {
    const double w = channel_frequency(e);
    const std::complex<double> z1 =
        pick_tracked(channel_spectrum({label.m, e, g, +1, basis_size, w}), label.n1, prev1);
    const std::complex<double> z2 =
        pick_tracked(channel_spectrum({label.m, e, g, -1, basis_size, w}), label.n2, prev2);
    prev1 = z1;
    prev2 = z2;
    state.z1 = z1;
    state.z2 = z2;
    return z1 + z2 - 1.0;
  };

  const auto accept_if_valid = [&]() {
    if (state.energy.real() > -0.5 * min_confinement) {
      state.converged = false;
      state.failure = "confinement lost: Re E too close to 0 for the channel basis";
      return;
    }
    state.converged = true;
  };

  constexpr double tol = 1e-10;
  constexpr int max_iterations = 50;
  try {
    std::complex<double> e0 = seed;
    std::complex<double> r0 = residual_at(e0);
    state.energy = e0;
    state.residual = std::abs(r0);
    if (state.residual <= tol) {
      accept_if_valid();
      return state;
    }
    std::complex<double> e1 = e0 * (1.0 + 1e-6) + 1e-9;
    std::complex<double> r1 = residual_at(e1);
    for (int iteration = 0; iteration < max_iterations; ++iteration) {
      state.iterations = iteration + 1;
      if (r1 == r0) break;  // flat secant: no progress possible
      const std::complex<double> e2 = e1 - r1 * (e1 - e0) / (r1 - r0);
      e0 = e1;
      r0 = r1;
      e1 = e2;
      if (std::abs(e1) > escape_radius) {
        state.energy = e1;
        state.residual = std::numeric_limits<double>::infinity();
        state.failure = "basin escape: |E| grew beyond 10x the seed";
        return state;
      }
      r1 = residual_at(e1);
      state.energy = e1;
      state.residual = std::abs(r1);
      if (state.residual <= tol) {
        accept_if_valid();
        return state;
      }
    }
    state.failure = "quantization residual did not reach 1e-10";
  } catch (const numerical_error& failure) {
    state.residual = std::numeric_limits<double>::infinity();
    state.failure = failure.what();
  }
  return state;
}

}  // namespace detail

// Solve one hydrogen Stark state. The default seed is the first-order energy
// -1/(2n^2) + i (3/2) n q g; divergence after 50 iterations and basin escape
// (|E| beyond 10x the seed) are reported as errors carrying the trace.
inline SeparationState solve_state(const ParabolicLabel& label, double g,
                                   std::optional<std::complex<double>> initial = {},
                                   int basis_size = 40) {
  SeparationState state = detail::try_solve_state(label, g, initial, basis_size);
  if (!state.converged) {
    const std::string where = " for (n1=" + std::to_string(label.n1) + ", n2=" +
                              std::to_string(label.n2) + ", m=" + std::to_string(label.m) +
                              ") at g = " + std::to_string(g) + ", last E = (" +
                              std::to_string(state.energy.real()) + ", " +
                              std::to_string(state.energy.imag()) + ")";
    if (std::isfinite(state.residual) && state.residual > 1e-10)
      throw convergence_error("solve_state: " + state.failure + where, state.iterations);
    throw numerical_error("solve_state: " + state.failure + where);
  }
  return state;
}

// Continuation over an ascending g grid: each point is seeded by the last
// converged energy. Failed points are recorded (converged = false) and the
// scan moves on.
inline std::vector<SeparationState> scan_state(const ParabolicLabel& label,
                                               const std::vector<double>& g_grid,
                                               int basis_size = 40) {
  validate(label);
  for (std::size_t i = 1; i < g_grid.size(); ++i)
    if (!(g_grid[i] > g_grid[i - 1]))
      throw std::invalid_argument("scan_state: g_grid must be strictly ascending");

  std::vector<SeparationState> trajectory;
  trajectory.reserve(g_grid.size());
  std::optional<std::complex<double>> seed;
  for (double g : g_grid) {
    SeparationState state = detail::try_solve_state(label, g, seed, basis_size);
    // A state with q != 0 acquires an imaginary part at first order in g, so a
    // converged root that sits on the real axis at g > 0 belongs to a different
    // branch of the quantization condition; keep the trajectory honest by
    // recording such captures as failures instead of following the wrong root.
    if (state.converged && label.q() != 0 && g > 0.0 &&
        std::abs(state.energy.imag()) < 1e-9) {
      state.converged = false;
      state.failure = "branch capture: real root reached from a state with q != 0";
    }
    if (state.converged) seed = state.energy;
    trajectory.push_back(std::move(state));
  }
  return trajectory;
}

}  // namespace ptstark
