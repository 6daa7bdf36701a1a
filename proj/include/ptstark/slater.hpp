#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ptstark/angular.hpp"
#include "ptstark/linalg.hpp"

namespace ptstark {

// Nonorthogonal Slater-type basis r^(l+j) e^(-alpha r) Y_l^m with a single
// shared exponent, l = |m|..l_max and j = 0..n_radial-1. Radial powers are
// restricted to n >= l so every function is in the form domain of the
// kinetic operator.
struct BasisSpec {
  double alpha = 2.0;
  int m = 0;
  int l_max = 6;
  int n_radial = 10;
};

inline void validate(const BasisSpec& basis) {
  if (!(basis.alpha > 0.0)) throw std::invalid_argument("BasisSpec: alpha must be > 0");
  if (basis.l_max < std::abs(basis.m))
    throw std::invalid_argument("BasisSpec: l_max must be >= |m|");
  if (basis.n_radial < 1) throw std::invalid_argument("BasisSpec: n_radial must be >= 1");
}

// Enumerate the basis functions; nu is the extra radial power j, so the
// function is r^(l+nu) e^(-alpha r) Y_l^m.
inline std::vector<SphericalLabel> basis_labels(const BasisSpec& basis) {
  validate(basis);
  std::vector<SphericalLabel> labels;
  labels.reserve(std::size_t(basis.l_max - std::abs(basis.m) + 1) * std::size_t(basis.n_radial));
  for (int l = std::abs(basis.m); l <= basis.l_max; ++l)
    for (int j = 0; j < basis.n_radial; ++j) labels.push_back({j, l, basis.m});
  return labels;
}

// int_0^inf r^p e^(-beta r) dr = p! / beta^(p+1), accumulated as an
// iterative product so it stays finite and accurate up to p = 200.
inline double radial_integral(int p, double beta) {
  if (p < 0) throw std::invalid_argument("radial_integral: p must be >= 0");
  if (!(beta > 0.0)) throw std::invalid_argument("radial_integral: beta must be > 0");
  double value = 1.0 / beta;
  for (int k = 1; k <= p; ++k) value *= double(k) / beta;
  return value;
}

enum class PotentialKind { harmonic, coulomb, linear };

namespace detail {

// Total radial power of function a: n_a = l_a + nu_a.
inline int radial_power(const SphericalLabel& f) { return f.l + f.nu; }

template <typename Element>
Eigen::MatrixXd assemble(const BasisSpec& basis, Element&& element) {
  const auto labels = basis_labels(basis);
  const Eigen::Index dim = Eigen::Index(labels.size());
  Eigen::MatrixXd out(dim, dim);
  for (Eigen::Index a = 0; a < dim; ++a)
    for (Eigen::Index b = 0; b < dim; ++b) out(a, b) = element(labels[a], labels[b]);
  return out;
}

}  // namespace detail

// S[a,b] = delta_{l_a l_b} * I(n_a + n_b + 2, 2 alpha); the r^2 comes from
// the volume element. Positive definiteness is checked in build_pencil.
inline Eigen::MatrixXd overlap_matrix(const BasisSpec& basis) {
  return detail::assemble(basis, [&](const SphericalLabel& a, const SphericalLabel& b) {
    if (a.l != b.l) return 0.0;
    return radial_integral(detail::radial_power(a) + detail::radial_power(b) + 2, 2.0 * basis.alpha);
  });
}

// T[a,b] = <a| -1/2 laplacian |b>. Acting on r^n e^(-alpha r) inside the
// fixed-l radial equation,
//   -1/2 [d^2/dr^2 + (2/r) d/dr - l(l+1)/r^2] r^n e^(-alpha r)
//     = -1/2 [ (n(n+1) - l(l+1)) r^(n-2) - 2 alpha (n+1) r^(n-1)
//              + alpha^2 r^n ] e^(-alpha r),
// so every entry is a combination of three radial integrals. The analytic
// form is already symmetric; the explicit (M + M^T)/2 step removes the
// last rounding noise.
inline Eigen::MatrixXd kinetic_matrix(const BasisSpec& basis) {
  const double alpha = basis.alpha;
  Eigen::MatrixXd t =
      detail::assemble(basis, [&](const SphericalLabel& a, const SphericalLabel& b) {
        if (a.l != b.l) return 0.0;
        const int na = detail::radial_power(a);
        const int nb = detail::radial_power(b);
        const double centrifugal = double(nb) * double(nb + 1) - double(b.l) * double(b.l + 1);
        return -0.5 * (centrifugal * radial_integral(na + nb, 2.0 * alpha) -
                       2.0 * alpha * double(nb + 1) * radial_integral(na + nb + 1, 2.0 * alpha) +
                       alpha * alpha * radial_integral(na + nb + 2, 2.0 * alpha));
      });
  return 0.5 * (t + t.transpose()).eval();
}

// V[a,b] = delta_{l_a l_b} * c * I(n_a + n_b + 2 + d, 2 alpha) with
// (c, d) = (1/2, 2) for r^2/2, (-1, -1) for -1/r, (1, 1) for r.
inline Eigen::MatrixXd potential_matrix(const BasisSpec& basis, PotentialKind kind) {
  double c = 0.0;
  int d = 0;
  switch (kind) {
    case PotentialKind::harmonic: c = 0.5;  d = 2;  break;
    case PotentialKind::coulomb:  c = -1.0; d = -1; break;
    case PotentialKind::linear:   c = 1.0;  d = 1;  break;
  }
  return detail::assemble(basis, [&](const SphericalLabel& a, const SphericalLabel& b) {
    if (a.l != b.l) return 0.0;
    return c * radial_integral(detail::radial_power(a) + detail::radial_power(b) + 2 + d,
                               2.0 * basis.alpha);
  });
}

// Z[a,b] = <a| r cos(theta) |b>
//        = cos_theta_element(l_a, l_b, m) * I(n_a + n_b + 3, 2 alpha);
// nonzero only for |l_a - l_b| = 1.
inline Eigen::MatrixXd z_matrix(const BasisSpec& basis) {
  return detail::assemble(basis, [&](const SphericalLabel& a, const SphericalLabel& b) {
    if (std::abs(a.l - b.l) != 1) return 0.0;
    return cos_theta_element(a.l, b.l, basis.m) *
           radial_integral(detail::radial_power(a) + detail::radial_power(b) + 3,
                           2.0 * basis.alpha);
  });
}

// Matrix representation of H = H0 + i g z over the Slater basis: the real
// symmetric blocks S, H0 = T + V and Z. D Z D = -Z and D H0 D = H0 with the
// parity diagonal D = diag((-1)^{l_a}); that identity is what closes the
// spectrum under complex conjugation at every g.
struct MatrixPencil {
  Eigen::MatrixXd S;
  Eigen::MatrixXd H0;
  Eigen::MatrixXd Z;
  BasisSpec basis;
  PotentialKind potential_kind = PotentialKind::linear;

  Eigen::Index dim() const { return S.rows(); }
};

// Assemble and validate the pencil. Cholesky failure of S (possible at large
// n_radial) is propagated with the offending pivot index.
inline MatrixPencil build_pencil(const BasisSpec& basis, PotentialKind kind) {
  validate(basis);
  MatrixPencil pencil{overlap_matrix(basis),
                      kinetic_matrix(basis) + potential_matrix(basis, kind),
                      z_matrix(basis), basis, kind};
  cholesky_lower(pencil.S);  // throws cholesky_error on a non-positive pivot
  return pencil;
}

}  // namespace ptstark
