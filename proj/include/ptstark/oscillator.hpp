#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ptstark/slater.hpp"
#include "ptstark/solve.hpp"

namespace ptstark {

// Exact level of H = p^2/2 + r^2/2 + i g z. The shift e^(-g p_z) maps H to
// H0 + g^2/2, so every level is the unperturbed k + 3/2 rigidly raised by
// g^2/2 and the spectrum stays real for every g.
struct OscillatorLevel {
  int k = 0;
  double g = 0.0;
  double energy = 1.5;
};

inline double ho_energy(int k, double g) {
  if (k < 0) throw std::invalid_argument("ho_energy: k must be >= 0");
  return double(k) + 1.5 + 0.5 * g * g;
}

inline OscillatorLevel oscillator_level(int k, double g) {
  return {k, g, ho_energy(k, g)};
}

// Spectral check of the similarity transformation: the variational spectrum
// at coupling g must equal the g = 0 spectrum shifted by g^2/2. Returns the
// largest deviation max_i |E_i(g) - (E_i(0) + g^2/2)| over the lowest
// n_levels states of the pencil. The transformation operator itself is never
// constructed; isospectrality is the testable consequence.
inline double similarity_check(const BasisSpec& basis, double g, int n_levels) {
  if (n_levels < 1) throw std::invalid_argument("similarity_check: n_levels must be >= 1");
  const MatrixPencil pencil = build_pencil(basis, PotentialKind::harmonic);
  if (Eigen::Index(n_levels) > pencil.dim())
    throw std::invalid_argument("similarity_check: n_levels exceeds basis dimension");
  const Spectrum at_zero = solve_pencil(pencil, 0.0);
  const Spectrum at_g = solve_pencil(pencil, g);
  double worst = 0.0;
  for (int i = 0; i < n_levels; ++i)
    worst = std::max(worst, std::abs(at_g.eigenvalues[i] -
                                     (at_zero.eigenvalues[i] + 0.5 * g * g)));
  return worst;
}

}  // namespace ptstark
