#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "ptstark/errors.hpp"
#include "ptstark/solve.hpp"

namespace ptstark {

// Eigenvalue trajectories over an ascending g grid. Each trajectory carries
// one point per grid value; solver failures become gap markers, matching
// ambiguities are flagged rather than hidden.
struct GScan {
  struct Point {
    std::complex<double> e;
    bool ok = false;
    bool ambiguous = false;
  };

  std::vector<double> g_grid;
  std::vector<std::vector<Point>> trajectories;  // [trajectory][grid index]
  std::string source;
};

// Bracketed (and optionally bisection-refined) location where a tracked pair
// of eigenvalues leaves the real axis and becomes a complex-conjugate pair.
struct ExceptionalPointEstimate {
  int trajectory_a = 0;
  int trajectory_b = 0;
  double g_lower = 0.0;
  double g_upper = 0.0;
  double g_estimate = 0.0;
  double min_gap = std::numeric_limits<double>::infinity();
  bool refined = false;
  // Pair energies on the real side of the bracket; carried so refinement can
  // re-identify the pair without the original scan.
  std::complex<double> e_a_lower;
  std::complex<double> e_b_lower;
};

using SpectrumFn = std::function<Spectrum(double)>;

inline std::vector<double> linspace(double lo, double hi, int count) {
  if (count < 1) throw std::invalid_argument("linspace: count must be >= 1");
  if (count == 1) return {lo};
  std::vector<double> grid(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    grid[std::size_t(i)] = lo + (hi - lo) * double(i) / double(count - 1);
  return grid;
}

// Track the lowest n_track eigenvalues across the grid. Consecutive points
// are matched greedily on sorted complex-plane displacements; a trajectory is
// flagged ambiguous at a point when its best and second-best candidates lie
// within 10% of each other. A failed solve produces a gap at every
// trajectory and tracking resumes from the last known energies.
inline GScan scan(const SpectrumFn& solver, const std::vector<double>& g_grid, int n_track,
                  std::string source = {}) {
  if (g_grid.empty()) throw std::invalid_argument("scan: empty g grid");
  for (std::size_t i = 1; i < g_grid.size(); ++i)
    if (!(g_grid[i] > g_grid[i - 1]))
      throw std::invalid_argument("scan: g_grid must be strictly ascending");
  if (n_track < 1) throw std::invalid_argument("scan: n_track must be >= 1");

  GScan result;
  result.g_grid = g_grid;
  result.source = std::move(source);
  result.trajectories.assign(std::size_t(n_track),
                             std::vector<GScan::Point>(g_grid.size()));

  std::vector<std::complex<double>> reference(static_cast<std::size_t>(n_track));
  bool initialized = false;

  for (std::size_t gi = 0; gi < g_grid.size(); ++gi) {
    std::optional<Spectrum> spectrum;
    try {
      spectrum = solver(g_grid[gi]);
    } catch (const numerical_error&) {
      spectrum.reset();  // gap at this grid point, scan continues
    }
    if (!spectrum) continue;
    const Eigen::VectorXcd& values = spectrum->eigenvalues;
    if (values.size() < n_track)
      throw std::invalid_argument("scan: solver returned fewer eigenvalues than n_track");

    if (!initialized) {
      // Spectrum arrives sorted by (Re, Im); adopt the lowest n_track states.
      for (int t = 0; t < n_track; ++t) {
        reference[std::size_t(t)] = values[t];
        result.trajectories[std::size_t(t)][gi] = {values[t], true, false};
      }
      initialized = true;
      continue;
    }

    // Greedy assignment on globally sorted displacements.
    std::vector<std::tuple<double, int, Eigen::Index>> candidates;
    candidates.reserve(std::size_t(n_track) * std::size_t(values.size()));
    for (int t = 0; t < n_track; ++t)
      for (Eigen::Index j = 0; j < values.size(); ++j)
        candidates.emplace_back(std::abs(values[j] - reference[std::size_t(t)]), t, j);
    std::sort(candidates.begin(), candidates.end(),
              [](const auto& a, const auto& b) { return a < b; });

    std::vector<bool> trajectory_done(std::size_t(n_track), false);
    std::vector<bool> value_used(std::size_t(values.size()), false);
    int assigned = 0;
    for (const auto& [distance, t, j] : candidates) {
      if (trajectory_done[std::size_t(t)] || value_used[std::size_t(j)]) continue;
      trajectory_done[std::size_t(t)] = true;
      value_used[std::size_t(j)] = true;
      reference[std::size_t(t)] = values[j];
      result.trajectories[std::size_t(t)][gi] = {values[j], true, false};
      if (++assigned == n_track) break;
    }

    // Ambiguity flags: best vs second-best displacement (both measured from
    // the pre-assignment reference) within 10% of each other.
    for (int t = 0; t < n_track; ++t) {
      double best = std::numeric_limits<double>::infinity();
      double second = std::numeric_limits<double>::infinity();
      for (const auto& [distance, ct, cj] : candidates) {
        if (ct != t) continue;
        if (distance < best) {
          second = best;
          best = distance;
        } else if (distance < second) {
          second = distance;
        }
      }
      if (std::isfinite(second) && second - best <= 0.1 * best)
        result.trajectories[std::size_t(t)][gi].ambiguous = true;
    }
  }
  return result;
}

// Bracket every transition where a trajectory's imaginary part crosses
// im_tol between consecutive grid points. The partner trajectory is the one
// closest to the complex conjugate on the upper side; each unordered pair is
// reported once.
inline std::vector<ExceptionalPointEstimate> detect_exceptional_points(const GScan& scan_result,
                                                                       double im_tol = 1e-7) {
  std::vector<ExceptionalPointEstimate> estimates;
  std::set<std::tuple<int, int, std::size_t>> seen;
  const int n_track = int(scan_result.trajectories.size());

  for (int t = 0; t < n_track; ++t) {
    const auto& trajectory = scan_result.trajectories[std::size_t(t)];
    for (std::size_t gi = 1; gi < scan_result.g_grid.size(); ++gi) {
      const auto& before = trajectory[gi - 1];
      const auto& after = trajectory[gi];
      if (!before.ok || !after.ok) continue;
      if (!(std::abs(before.e.imag()) <= im_tol && std::abs(after.e.imag()) > im_tol)) continue;

      // Partner: nearest to the conjugate on the complex side.
      int partner = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int u = 0; u < n_track; ++u) {
        if (u == t || !scan_result.trajectories[std::size_t(u)][gi].ok) continue;
        const double d =
            std::abs(scan_result.trajectories[std::size_t(u)][gi].e - std::conj(after.e));
        if (d < best) {
          best = d;
          partner = u;
        }
      }
      if (partner < 0) partner = t;  // single tracked member of the pair

      const int a = std::min(t, partner);
      const int b = std::max(t, partner);
      if (!seen.insert({a, b, gi}).second) continue;

      ExceptionalPointEstimate estimate;
      estimate.trajectory_a = a;
      estimate.trajectory_b = b;
      estimate.g_lower = scan_result.g_grid[gi - 1];
      estimate.g_upper = scan_result.g_grid[gi];
      estimate.g_estimate = 0.5 * (estimate.g_lower + estimate.g_upper);
      estimate.e_a_lower = scan_result.trajectories[std::size_t(a)][gi - 1].e;
      estimate.e_b_lower = scan_result.trajectories[std::size_t(b)][gi - 1].e;
      for (std::size_t k = 0; k < scan_result.g_grid.size(); ++k) {
        const auto& pa = scan_result.trajectories[std::size_t(a)][k];
        const auto& pb = scan_result.trajectories[std::size_t(b)][k];
        if (pa.ok && pb.ok && a != b)
          estimate.min_gap = std::min(estimate.min_gap, std::abs(pa.e - pb.e));
      }
      estimates.push_back(estimate);
    }
  }
  return estimates;
}

// Bisection on the reality of the tracked pair. The pair is re-identified at
// each midpoint as the two eigenvalues nearest the pair centroid; when a
// third eigenvalue crowds the pair (tracking loss) the current estimate is
// returned with refined = false.
inline ExceptionalPointEstimate refine_exceptional_point(const SpectrumFn& solver,
                                                         ExceptionalPointEstimate estimate,
                                                         double tol_g, double im_tol = 1e-7) {
  if (!(tol_g > 0.0)) throw std::invalid_argument("refine_exceptional_point: tol_g must be > 0");
  double lo = estimate.g_lower;
  double hi = estimate.g_upper;
  std::complex<double> centroid = 0.5 * (estimate.e_a_lower + estimate.e_b_lower);

  while (hi - lo > tol_g) {
    const double mid = 0.5 * (lo + hi);
    Spectrum spectrum;
    try {
      spectrum = solver(mid);
    } catch (const numerical_error&) {
      estimate.refined = false;
      estimate.g_estimate = 0.5 * (lo + hi);
      estimate.g_lower = lo;
      estimate.g_upper = hi;
      return estimate;  // solver failure inside the bracket: report unrefined
    }
    const Eigen::VectorXcd& values = spectrum.eigenvalues;
    if (values.size() < 2) {
      estimate.refined = false;
      return estimate;
    }

    // Two eigenvalues nearest the centroid, plus the third for the loss test.
    Eigen::Index i1 = -1, i2 = -1;
    double d1 = std::numeric_limits<double>::infinity();
    double d2 = d1, d3 = d1;
    for (Eigen::Index j = 0; j < values.size(); ++j) {
      const double d = std::abs(values[j] - centroid);
      if (d < d1) {
        d3 = d2; d2 = d1; i2 = i1;
        d1 = d; i1 = j;
      } else if (d < d2) {
        d3 = d2;
        d2 = d; i2 = j;
      } else if (d < d3) {
        d3 = d;
      }
    }
    if (values.size() > 2 && d3 < 2.0 * d2) {
      // A third eigenvalue is as close to the pair as the pair itself:
      // continuity tracking is no longer trustworthy.
      estimate.refined = false;
      estimate.g_estimate = 0.5 * (lo + hi);
      estimate.g_lower = lo;
      estimate.g_upper = hi;
      return estimate;
    }

    const std::complex<double> ea = values[i1];
    const std::complex<double> eb = values[i2];
    estimate.min_gap = std::min(estimate.min_gap, std::abs(ea - eb));
    centroid = 0.5 * (ea + eb);
    if (std::max(std::abs(ea.imag()), std::abs(eb.imag())) > im_tol)
      hi = mid;
    else
      lo = mid;
  }

  estimate.g_lower = lo;
  estimate.g_upper = hi;
  estimate.g_estimate = 0.5 * (lo + hi);
  estimate.refined = true;
  return estimate;
}

// Smallest refined exceptional-point estimate: the PT transition coupling of
// the tracked window. Empty when nothing crossed.
inline std::optional<double> estimate_gc(const std::vector<ExceptionalPointEstimate>& estimates) {
  std::optional<double> gc;
  for (const auto& estimate : estimates)
    if (estimate.refined && (!gc || estimate.g_estimate < *gc)) gc = estimate.g_estimate;
  return gc;
}

}  // namespace ptstark
