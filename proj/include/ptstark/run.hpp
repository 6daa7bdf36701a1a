#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ptstark/errors.hpp"
#include "ptstark/hydrogen.hpp"
#include "ptstark/perturbation.hpp"
#include "ptstark/scan.hpp"
#include "ptstark/slater.hpp"
#include "ptstark/solve.hpp"
#include "ptstark/version.hpp"

namespace ptstark {

// File-system failure while writing results; the path is part of the message.
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

// One batch run: which model to build, which couplings to visit, where the
// CSV goes. Optional fields fall back to documented per-command defaults so
// the effective values can be recorded in the output metadata.
struct RunConfig {
  std::string command;        // ho | coulomb | linear | perturb | scan | hydrogen-parabolic
  double alpha = 2.0;         // shared Slater exponent
  int m = 0;                  // magnetic quantum number of the basis
  std::optional<int> l_max;   // default |m| + 6
  int n_radial = 10;          // radial functions per angular momentum
  std::optional<double> g;    // single-coupling run when set
  double g_min = 0.0;         // grid start when g is not set
  std::optional<double> g_max;  // grid end; default 1 (0.1 for hydrogen-parabolic)
  int g_steps = 101;          // grid point count
  std::optional<int> n_track;   // trajectories to track; default min(8, dimension)
  std::string model;          // perturb: ho | linear | hydrogen; scan: ho | coulomb | linear
  int n_shell = 2;            // perturb --model hydrogen: principal quantum number
  int n_max = 3;              // hydrogen-parabolic: include all states with n <= n_max
  int basis_size = 40;        // hydrogen-parabolic: channel oscillator basis size
  double im_tol = 1e-7;       // scan: |Im E| threshold separating real from complex
  std::string output_path;    // default "<command>.csv"
  bool emit_svg = false;      // also write simple polyline plots next to the CSV
};

inline int effective_l_max(const RunConfig& config) {
  return config.l_max.value_or(std::abs(config.m) + 6);
}

inline double effective_g_max(const RunConfig& config) {
  return config.g_max.value_or(config.command == "hydrogen-parabolic" ? 0.1 : 1.0);
}

inline std::string effective_model(const RunConfig& config) {
  if (!config.model.empty()) return config.model;
  return config.command == "perturb" ? "hydrogen" : "linear";
}

inline std::string effective_output_path(const RunConfig& config) {
  return config.output_path.empty() ? config.command + ".csv" : config.output_path;
}

inline std::vector<double> coupling_grid(const RunConfig& config) {
  if (config.g) return {*config.g};
  return linspace(config.g_min, effective_g_max(config), config.g_steps);
}

inline void validate(const RunConfig& config) {
  static const std::vector<std::string> commands = {"ho",      "coulomb", "linear",
                                                    "perturb", "scan",    "hydrogen-parabolic"};
  if (std::find(commands.begin(), commands.end(), config.command) == commands.end())
    throw std::invalid_argument("RunConfig: unknown command '" + config.command + "'");
  if (!(config.alpha > 0.0)) throw std::invalid_argument("RunConfig: alpha must be > 0");
  if (effective_l_max(config) < std::abs(config.m))
    throw std::invalid_argument("RunConfig: l_max must be >= |m|");
  if (config.n_radial < 1) throw std::invalid_argument("RunConfig: n_radial must be >= 1");
  if (config.g && !std::isfinite(*config.g))
    throw std::invalid_argument("RunConfig: g must be finite");
  if (!config.g) {
    if (config.g_steps < 1) throw std::invalid_argument("RunConfig: g_steps must be >= 1");
    if (config.g_steps > 1 && !(config.g_min < effective_g_max(config)))
      throw std::invalid_argument("RunConfig: g_min must be < g_max");
  }
  if (config.n_track && *config.n_track < 1)
    throw std::invalid_argument("RunConfig: n_track must be >= 1");
  if (config.command == "perturb") {
    const std::string model = effective_model(config);
    if (model != "ho" && model != "linear" && model != "hydrogen")
      throw std::invalid_argument("RunConfig: perturb model must be ho, linear, or hydrogen");
    if (config.n_shell < 1) throw std::invalid_argument("RunConfig: n must be >= 1");
  }
  if (config.command == "scan") {
    const std::string model = effective_model(config);
    if (model != "ho" && model != "coulomb" && model != "linear")
      throw std::invalid_argument("RunConfig: scan model must be ho, coulomb, or linear");
    if (!(config.im_tol > 0.0)) throw std::invalid_argument("RunConfig: im_tol must be > 0");
  }
  if (config.command == "hydrogen-parabolic") {
    if (config.n_max < 1) throw std::invalid_argument("RunConfig: n-max must be >= 1");
    if (config.basis_size < 10)
      throw std::invalid_argument("RunConfig: basis-size must be >= 10");
  }
}

namespace detail {

// Fixed scientific format with 12 significant digits: diffable golden files.
inline std::string format_float(double value) {
  if (std::isnan(value)) return "nan";
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.11e", value);
  return buffer;
}

inline void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw io_error("cannot open '" + path + "' for writing");
  file << body;
  file.flush();
  if (!file) throw io_error("write failed for '" + path + "'");
}

inline PotentialKind potential_from_name(const std::string& name) {
  if (name == "ho") return PotentialKind::harmonic;
  if (name == "coulomb") return PotentialKind::coulomb;
  if (name == "linear") return PotentialKind::linear;
  throw std::invalid_argument("unknown potential '" + name + "'");
}

inline std::string svg_path_for(const std::string& csv_path) {
  const std::string suffix = ".csv";
  if (csv_path.size() >= suffix.size() &&
      csv_path.compare(csv_path.size() - suffix.size(), suffix.size(), suffix) == 0)
    return csv_path.substr(0, csv_path.size() - suffix.size()) + ".svg";
  return csv_path + ".svg";
}

// Shared comment header: everything needed to reproduce the run.
inline std::vector<std::string> metadata_lines(const RunConfig& config,
                                               const std::vector<double>& grid, int n_track) {
  std::vector<std::string> lines;
  lines.push_back("# command=" + config.command);
  lines.push_back("# alpha=" + format_float(config.alpha));
  lines.push_back("# m=" + std::to_string(config.m));
  lines.push_back("# l_max=" + std::to_string(effective_l_max(config)));
  lines.push_back("# n_radial=" + std::to_string(config.n_radial));
  lines.push_back("# g_min=" + format_float(grid.front()));
  lines.push_back("# g_max=" + format_float(grid.back()));
  lines.push_back("# g_steps=" + std::to_string(grid.size()));
  lines.push_back("# n_track=" + std::to_string(n_track));
  return lines;
}

}  // namespace detail

// Write a scan as CSV: comment header, column names, one row per (grid point,
// trajectory) sorted by (g, trajectory_id). Gap points carry nan energies.
inline void export_csv(const GScan& scan_result, const std::string& path,
                       const std::vector<std::string>& metadata = {}) {
  struct Row {
    double g;
    int trajectory;
    GScan::Point point;
  };
  std::vector<Row> rows;
  rows.reserve(scan_result.g_grid.size() * scan_result.trajectories.size());
  for (std::size_t gi = 0; gi < scan_result.g_grid.size(); ++gi)
    for (std::size_t t = 0; t < scan_result.trajectories.size(); ++t)
      rows.push_back({scan_result.g_grid[gi], int(t), scan_result.trajectories[t][gi]});
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return a.g != b.g ? a.g < b.g : a.trajectory < b.trajectory;
  });

  std::string body = "# ptstark version=" + std::string(version()) + "\n";
  if (!scan_result.source.empty()) body += "# source=" + scan_result.source + "\n";
  for (const std::string& line : metadata) body += line + "\n";
  body += "g,trajectory_id,re_e,im_e,flags\n";
  for (const Row& row : rows) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double re = row.point.ok ? row.point.e.real() : nan;
    const double im = row.point.ok ? row.point.e.imag() : nan;
    const char* flags = !row.point.ok ? "gap" : (row.point.ambiguous ? "ambiguous-match" : "ok");
    body += detail::format_float(row.g) + "," + std::to_string(row.trajectory) + "," +
            detail::format_float(re) + "," + detail::format_float(im) + "," + flags + "\n";
  }
  detail::write_text_file(path, body);
}

// Decorative companion plot: Re E and Im E against g as one polyline per
// trajectory, split at gaps. Everything is formatted with fixed precision so
// repeated runs stay byte-identical.
inline void export_svg(const GScan& scan_result, const std::string& path) {
  const double width = 900.0, panel_height = 260.0, margin = 55.0, gap_between = 60.0;
  const double height = 2.0 * panel_height + gap_between + 2.0 * margin;

  const auto coordinate = [](double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.2f", value);
    return std::string(buffer);
  };
  const auto tick = [](double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.4g", value);
    return std::string(buffer);
  };
  static const char* palette[8] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

  std::string body = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + coordinate(width) +
                     "\" height=\"" + coordinate(height) + "\" viewBox=\"0 0 " +
                     coordinate(width) + " " + coordinate(height) + "\">\n";
  body += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  const double g_lo = scan_result.g_grid.empty() ? 0.0 : scan_result.g_grid.front();
  const double g_hi = scan_result.g_grid.empty() ? 1.0 : scan_result.g_grid.back();
  const double g_span = std::max(g_hi - g_lo, 1e-12);

  const auto panel = [&](bool imaginary, double top) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& trajectory : scan_result.trajectories)
      for (const auto& point : trajectory)
        if (point.ok) {
          const double value = imaginary ? point.e.imag() : point.e.real();
          lo = std::min(lo, value);
          hi = std::max(hi, value);
        }
    if (!(lo < hi)) {
      lo = (lo < hi) ? lo : (std::isfinite(lo) ? lo - 1.0 : -1.0);
      hi = lo + 2.0;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;

    const double left = margin, right = width - 25.0;
    const double bottom = top + panel_height;
    const auto x_of = [&](double g) { return left + (g - g_lo) / g_span * (right - left); };
    const auto y_of = [&](double v) { return bottom - (v - lo) / (hi - lo) * panel_height; };

    body += "<rect x=\"" + coordinate(left) + "\" y=\"" + coordinate(top) + "\" width=\"" +
            coordinate(right - left) + "\" height=\"" + coordinate(panel_height) +
            "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    body += "<text x=\"" + coordinate(left) + "\" y=\"" + coordinate(top - 8.0) +
            "\" font-family=\"sans-serif\" font-size=\"14\">" +
            (imaginary ? std::string("Im E vs g") : std::string("Re E vs g")) + "</text>\n";
    body += "<text x=\"" + coordinate(left - 50.0) + "\" y=\"" + coordinate(top + 12.0) +
            "\" font-family=\"sans-serif\" font-size=\"11\">" + tick(hi) + "</text>\n";
    body += "<text x=\"" + coordinate(left - 50.0) + "\" y=\"" + coordinate(bottom) +
            "\" font-family=\"sans-serif\" font-size=\"11\">" + tick(lo) + "</text>\n";
    body += "<text x=\"" + coordinate(left) + "\" y=\"" + coordinate(bottom + 18.0) +
            "\" font-family=\"sans-serif\" font-size=\"11\">" + tick(g_lo) + "</text>\n";
    body += "<text x=\"" + coordinate(right - 30.0) + "\" y=\"" + coordinate(bottom + 18.0) +
            "\" font-family=\"sans-serif\" font-size=\"11\">" + tick(g_hi) + "</text>\n";

    for (std::size_t t = 0; t < scan_result.trajectories.size(); ++t) {
      const auto& trajectory = scan_result.trajectories[t];
      std::string points;
      const auto flush = [&]() {
        if (!points.empty()) {
          body += "<polyline fill=\"none\" stroke=\"" + std::string(palette[t % 8]) +
                  "\" stroke-width=\"1\" points=\"" + points + "\"/>\n";
          points.clear();
        }
      };
      for (std::size_t gi = 0; gi < trajectory.size(); ++gi) {
        if (!trajectory[gi].ok) {
          flush();
          continue;
        }
        const double value = imaginary ? trajectory[gi].e.imag() : trajectory[gi].e.real();
        if (!points.empty()) points += " ";
        points += coordinate(x_of(scan_result.g_grid[gi])) + "," + coordinate(y_of(value));
      }
      flush();
    }
  };

  panel(false, margin);
  panel(true, margin + panel_height + gap_between);
  body += "</svg>\n";
  detail::write_text_file(path, body);
}

namespace detail {

inline void append_condition_lines(std::vector<std::string>& metadata,
                                   const MatrixPencil& pencil) {
  const ConditionReport report = condition_diagnostics(pencil);
  metadata.push_back("# overlap_condition=" + format_float(report.overlap_condition));
  metadata.push_back("# smallest_pivot=" + format_float(report.smallest_pivot));
  metadata.push_back("# condition_warning=" + std::string(report.warning ? "1" : "0"));
}

// ho / coulomb / linear / scan: variational scan over the coupling grid; the
// scan command additionally reports exceptional points and the g_c estimate.
inline void run_variational(const RunConfig& config) {
  const bool with_exceptional_points = config.command == "scan";
  const PotentialKind kind = with_exceptional_points
                                 ? potential_from_name(effective_model(config))
                                 : potential_from_name(config.command);
  const BasisSpec basis{config.alpha, config.m, effective_l_max(config), config.n_radial};
  const MatrixPencil pencil = build_pencil(basis, kind);
  const int dimension = int(pencil.dim());
  const int n_track = config.n_track.value_or(std::min(8, dimension));
  if (n_track > dimension)
    throw std::invalid_argument("RunConfig: n_track " + std::to_string(n_track) +
                                " exceeds basis dimension " + std::to_string(dimension));

  const std::vector<double> grid = coupling_grid(config);
  const SpectrumFn solver = [&pencil](double g) { return solve_pencil(pencil, g); };
  const GScan scan_result = scan(solver, grid, n_track, config.command);

  std::vector<std::string> metadata = metadata_lines(config, grid, n_track);
  if (with_exceptional_points) metadata.push_back("# model=" + effective_model(config));
  append_condition_lines(metadata, pencil);

  if (with_exceptional_points) {
    std::vector<ExceptionalPointEstimate> estimates =
        detect_exceptional_points(scan_result, config.im_tol);
    const double step = grid.size() > 1 ? grid[1] - grid[0] : 1e-2;
    const double tol_g = std::max(1e-6, 1e-2 * step);
    std::vector<ExceptionalPointEstimate> refined;
    refined.reserve(estimates.size());
    for (const ExceptionalPointEstimate& estimate : estimates) {
      refined.push_back(refine_exceptional_point(solver, estimate, tol_g, config.im_tol));
      const ExceptionalPointEstimate& r = refined.back();
      metadata.push_back("# ep: a=" + std::to_string(r.trajectory_a) +
                         " b=" + std::to_string(r.trajectory_b) +
                         " g_lower=" + format_float(r.g_lower) +
                         " g_upper=" + format_float(r.g_upper) +
                         " estimate=" + format_float(r.g_estimate) +
                         " refined=" + (r.refined ? "1" : "0"));
    }
    const std::optional<double> gc = estimate_gc(refined);
    metadata.push_back("# gc_estimate=" + (gc ? format_float(*gc) : std::string("none")));
  }

  const std::string out = effective_output_path(config);
  export_csv(scan_result, out, metadata);
  if (config.emit_svg) export_svg(scan_result, svg_path_for(out));
}

// hydrogen-parabolic: continuation scan of every parabolic state with
// n <= n_max and m >= 0 (the -m spectra are identical).
inline void run_hydrogen(const RunConfig& config) {
  std::vector<ParabolicLabel> labels;
  for (int n = 1; n <= config.n_max; ++n)
    for (int m = 0; m < n; ++m)
      for (int n1 = 0; n1 + m < n; ++n1) labels.push_back({n1, n - 1 - m - n1, m});

  const std::vector<double> grid = coupling_grid(config);
  GScan scan_result;
  scan_result.g_grid = grid;
  scan_result.source = config.command;
  scan_result.trajectories.reserve(labels.size());

  std::vector<std::string> metadata = metadata_lines(config, grid, int(labels.size()));
  metadata.push_back("# basis_size=" + std::to_string(config.basis_size));
  for (std::size_t t = 0; t < labels.size(); ++t) {
    const ParabolicLabel& label = labels[t];
    metadata.push_back("# trajectory " + std::to_string(t) + ": n1=" + std::to_string(label.n1) +
                       " n2=" + std::to_string(label.n2) + " m=" + std::to_string(label.m) +
                       " n=" + std::to_string(label.n()) + " q=" + std::to_string(label.q()));
    std::vector<GScan::Point> trajectory;
    trajectory.reserve(grid.size());
    for (const SeparationState& state : scan_state(label, grid, config.basis_size))
      trajectory.push_back({state.energy, state.converged, false});
    scan_result.trajectories.push_back(std::move(trajectory));
  }

  const std::string out = effective_output_path(config);
  export_csv(scan_result, out, metadata);
  if (config.emit_svg) export_svg(scan_result, svg_path_for(out));
}

// perturb: first-order degenerate corrections at g = 0. The hydrogen model
// uses exact-shell bases per m block; ho and linear diagonalize the requested
// variational pencil and report every degenerate group among the lowest
// n_track states.
inline void run_perturb(const RunConfig& config) {
  const std::string model = effective_model(config);
  std::string body = "# ptstark version=" + std::string(version()) + "\n";
  body += "# source=" + config.command + "\n";

  struct Row {
    int index;
    double e0;
    double first_order;
    const char* verdict;
  };
  const auto verdict_name = [](PerturbationVerdict verdict) {
    return verdict == PerturbationVerdict::complex_for_small_g ? "complex-for-small-g"
                                                               : "inconclusive";
  };
  std::vector<Row> rows;
  const std::vector<double> zero_grid = {0.0};
  std::vector<std::string> metadata =
      metadata_lines(config, zero_grid, config.n_track.value_or(8));
  metadata.push_back("# model=" + model);

  if (model == "hydrogen") {
    metadata.push_back("# n=" + std::to_string(config.n_shell));
    const PerturbationReport report = hydrogen_shell_report(config.n_shell);
    std::string members;
    for (const std::string& name : report.subspace)
      members += (members.empty() ? "" : "; ") + name;
    metadata.push_back("# subspace: " + members);
    for (std::size_t k = 0; k < report.first_order.size(); ++k)
      rows.push_back({int(k), report.unperturbed_energy, report.first_order[k],
                      verdict_name(report.verdict)});
  } else {
    const BasisSpec basis{config.alpha, config.m, effective_l_max(config), config.n_radial};
    const MatrixPencil pencil = build_pencil(basis, potential_from_name(model));
    const int dimension = int(pencil.dim());
    const int n_report = std::min(config.n_track.value_or(8), dimension);
    append_condition_lines(metadata, pencil);

    const Spectrum at_zero = solve_pencil(pencil, 0.0);
    int index = 0;
    for (const std::vector<int>& group : degenerate_subspaces(at_zero)) {
      if (group.front() >= n_report) break;
      const Eigen::MatrixXd vectors = degenerate_group_vectors(pencil, group);
      const PerturbationReport report = first_order_corrections(pencil, group, vectors);
      for (std::size_t k = 0; k < report.first_order.size(); ++k, ++index)
        rows.push_back(
            {index, report.unperturbed_energy, report.first_order[k], verdict_name(report.verdict)});
    }
  }

  for (const std::string& line : metadata) body += line + "\n";
  body += "index,re_e0,first_order,verdict\n";
  for (const Row& row : rows)
    body += std::to_string(row.index) + "," + format_float(row.e0) + "," +
            format_float(row.first_order) + "," + row.verdict + "\n";
  detail::write_text_file(effective_output_path(config), body);
}

}  // namespace detail

// Execute one batch run. Exit status 0 on success, 2 on configuration or
// output-path errors, 3 on numerical failure; diagnostics go to the error
// stream. Identical configs produce byte-identical output files.
inline int run(const RunConfig& config) {
  try {
    validate(config);
    if (config.command == "perturb")
      detail::run_perturb(config);
    else if (config.command == "hydrogen-parabolic")
      detail::run_hydrogen(config);
    else
      detail::run_variational(config);
    return 0;
  } catch (const io_error& error) {
    std::cerr << "output error: " << error.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& error) {
    std::cerr << "config error: " << error.what() << "\n";
    return 2;
  } catch (const std::exception& error) {
    std::cerr << "numerical failure: " << error.what() << "\n";
    return 3;
  }
}

}  // namespace ptstark
