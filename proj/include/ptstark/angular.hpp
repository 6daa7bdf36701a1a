#pragma once

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace ptstark {

// Quantum numbers of a central-field state R(r) Y_l^m(theta, phi).
// nu counts radial nodes / radial powers within a fixed l.
struct SphericalLabel {
  int nu = 0;
  int l = 0;
  int m = 0;
};

// Parity of Y_l^m under r -> -r: (-1)^l.
inline int parity_eigenvalue(int l) {
  if (l < 0) throw std::invalid_argument("parity_eigenvalue: l must be >= 0");
  return (l % 2 == 0) ? +1 : -1;
}

// <Y_lp^m | cos(theta) | Y_l^m>. cos(theta) carries one unit of angular
// momentum and conserves m, so the element vanishes unless |l - lp| = 1;
// in that case, with L = min(l, lp),
//   <Y_{L+1}^m | cos(theta) | Y_L^m> = sqrt(((L+1)^2 - m^2) / ((2L+1)(2L+3))).
inline double cos_theta_element(int l, int lp, int m) {
  if (l < 0 || lp < 0)
    throw std::invalid_argument("cos_theta_element: l and lp must be >= 0");
  if (std::abs(m) > std::min(l, lp))
    throw std::invalid_argument("cos_theta_element: |m| must be <= min(l, lp)");
  if (std::abs(l - lp) != 1) return 0.0;
  const int L = std::min(l, lp);
  const double num = double(L + 1) * double(L + 1) - double(m) * double(m);
  const double den = double(2 * L + 1) * double(2 * L + 3);
  return std::sqrt(num / den);
}

// Nonzero support of <Y_lp^mp | cos(theta) | Y_l^m>: m conserved (cylindrical
// symmetry) and l changes by exactly one (parity of cos(theta)).
inline bool selection_allowed(int l, int lp, int m, int mp) {
  if (l < 0 || lp < 0)
    throw std::invalid_argument("selection_allowed: l and lp must be >= 0");
  return m == mp && std::abs(l - lp) == 1;
}

enum class DegeneracyModel { oscillator, hydrogen, generic_central };

// Degeneracy of an unperturbed level:
//   oscillator shell k: (k+1)(k+2)/2;  hydrogen shell n: n^2;
//   generic central-field level of angular momentum l: 2l+1.
inline long degeneracy(DegeneracyModel model, int level) {
  switch (model) {
    case DegeneracyModel::oscillator:
      if (level < 0) throw std::invalid_argument("degeneracy: oscillator k must be >= 0");
      return long(level + 1) * long(level + 2) / 2;
    case DegeneracyModel::hydrogen:
      if (level <= 0) throw std::invalid_argument("degeneracy: hydrogen n must be >= 1");
      return long(level) * long(level);
    case DegeneracyModel::generic_central:
      if (level < 0) throw std::invalid_argument("degeneracy: l must be >= 0");
      return 2L * level + 1;
  }
  throw std::invalid_argument("degeneracy: unknown model");
}

}  // namespace ptstark
