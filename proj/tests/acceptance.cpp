// Acceptance gate: eight end-to-end criteria, one [PASS]/[FAIL] line each.
// Exit status is the number of failed criteria. Usage:
//   acceptance <path-to-cli-binary> <scratch-directory>
// All tolerances are frozen here, next to the criterion they gate.

#include <sys/wait.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "ptstark/ptstark.hpp"

namespace {

using namespace ptstark;

std::string cli_path;
std::filesystem::path work_dir;

// ---------------------------------------------------------------------------
// Criterion 7 runs as a property suite over every solve issued by criteria
// 1-6: conjugation closure, complex symmetry of the reduced matrix, exact z
// selection zeros, +-m equality, and the exact parity identity D Z D = -Z.

struct PropertyTally {
  int solves = 0;
  int pencils = 0;
  int violations = 0;
  std::vector<std::string> notes;

  void flag(const std::string& note) {
    ++violations;
    if (notes.size() < 8) notes.push_back(note);
  }
};

PropertyTally properties;

void check_pencil_properties(const MatrixPencil& pencil, bool from_basis_spec) {
  ++properties.pencils;
  const auto labels = basis_labels(pencil.basis);

  if (Eigen::Index(labels.size()) == pencil.dim()) {
    for (Eigen::Index a = 0; a < pencil.dim(); ++a)
      for (Eigen::Index b = 0; b < pencil.dim(); ++b)
        if (!selection_allowed(labels[a].l, labels[b].l, labels[a].m, labels[b].m) &&
            pencil.Z(a, b) != 0.0)
          properties.flag("z selection rule violated at (" + std::to_string(a) + "," +
                          std::to_string(b) + ")");

    Eigen::VectorXd parity(pencil.dim());
    for (Eigen::Index a = 0; a < pencil.dim(); ++a)
      parity[a] = double(parity_eigenvalue(labels[std::size_t(a)].l));
    const Eigen::MatrixXd d = parity.asDiagonal();
    if ((d * pencil.Z * d + pencil.Z).cwiseAbs().maxCoeff() != 0.0)
      properties.flag("parity identity D Z D = -Z is not exact");
  }

  if (from_basis_spec) {
    const BasisSpec& basis = pencil.basis;
    const MatrixPencil mirrored =
        build_pencil(BasisSpec{basis.alpha, -basis.m, basis.l_max, basis.n_radial},
                     pencil.potential_kind);
    if ((pencil.S - mirrored.S).cwiseAbs().maxCoeff() != 0.0 ||
        (pencil.H0 - mirrored.H0).cwiseAbs().maxCoeff() != 0.0 ||
        (pencil.Z - mirrored.Z).cwiseAbs().maxCoeff() != 0.0)
      properties.flag("pencils for m and -m differ");
  }
}

MatrixPencil make_pencil(const BasisSpec& basis, PotentialKind kind) {
  MatrixPencil pencil = build_pencil(basis, kind);
  check_pencil_properties(pencil, /*from_basis_spec=*/true);
  return pencil;
}

Spectrum checked_solve(const MatrixPencil& pencil, double g) {
  const Spectrum spectrum = solve_pencil(pencil, g);
  ++properties.solves;

  // Conjugation closure to 1e-8.
  const Eigen::VectorXcd& values = spectrum.eigenvalues;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < values.size(); ++j)
      best = std::min(best, std::abs(values[j] - std::conj(values[i])));
    if (best > 1e-8 * std::max(1.0, std::abs(values[i])))
      properties.flag("conjugation closure broken at g = " + std::to_string(g));
  }

  // Complex symmetry of the reduced matrix to 1e-10 (relative).
  const Eigen::MatrixXcd m = reduce(pencil, g);
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    properties.flag("reduced matrix not complex symmetric at g = " + std::to_string(g));

  return spectrum;
}

// ---------------------------------------------------------------------------

struct CriterionResult {
  bool pass = false;
  std::string detail;
};

// Criterion 1: lowest three variational oscillator levels against
// k + 3/2 + g^2/2 for g in {0, 0.25, 0.5, 1}; first-order corrections < 1e-8.
// Tolerance frozen at 5e-3 by the convergence study (alpha = 2, l_max = 4,
// n_radial = 12): deviations measured 3.5e-5 (g = 0.25) and 2.4e-3 (g = 0.5).
CriterionResult criterion_1() {
  constexpr double level_tolerance = 5e-3;
  constexpr double first_order_tolerance = 1e-8;
  const MatrixPencil pencil = make_pencil(BasisSpec{2.0, 0, 4, 12}, PotentialKind::harmonic);

  double worst = 0.0;
  double worst_g = 0.0;
  for (double g : {0.0, 0.25, 0.5, 1.0}) {
    const Spectrum spectrum = checked_solve(pencil, g);
    for (int k = 0; k < 3; ++k) {
      const double deviation =
          std::abs(spectrum.eigenvalues[k] - std::complex<double>(ho_energy(k, g), 0.0));
      if (deviation > worst) {
        worst = deviation;
        worst_g = g;
      }
    }
  }

  double worst_first_order = 0.0;
  const Spectrum at_zero = checked_solve(pencil, 0.0);
  const auto groups = degenerate_subspaces(at_zero);
  for (int k = 0; k < 3 && k < int(groups.size()); ++k) {
    const Eigen::MatrixXd vectors = degenerate_group_vectors(pencil, groups[k]);
    const PerturbationReport report = first_order_corrections(pencil, groups[k], vectors);
    for (double w : report.first_order)
      worst_first_order = std::max(worst_first_order, std::abs(w));
  }

  char detail[160];
  std::snprintf(detail, sizeof detail,
                "max level deviation %.2e at g = %g (tolerance %.0e), max first order %.1e",
                worst, worst_g, level_tolerance, worst_first_order);
  return {worst <= level_tolerance && worst_first_order < first_order_tolerance, detail};
}

// Criterion 2: linear-potential l = 0 levels at g = 0 against the Airy-zero
// oracle E_k = |a_k| / 2^(1/3), within 1e-3 at n_radial = 12.
CriterionResult criterion_2() {
  constexpr double tolerance = 1e-3;
  const std::vector<double> zeros = oracle::airy_negative_zeros(2);
  const double cube_root_two = std::cbrt(2.0);
  const double e1 = std::abs(zeros[0]) / cube_root_two;
  const double e2 = std::abs(zeros[1]) / cube_root_two;
  if (std::abs(e1 - 1.8557571) > 1e-6 || std::abs(e2 - 3.2446076) > 1e-6)
    return {false, "Airy oracle drifted from its pinned digits"};

  const MatrixPencil pencil = make_pencil(BasisSpec{2.0, 0, 0, 12}, PotentialKind::linear);
  const Spectrum spectrum = checked_solve(pencil, 0.0);
  const double d1 = std::abs(spectrum.eigenvalues[0] - std::complex<double>(e1, 0.0));
  const double d2 = std::abs(spectrum.eigenvalues[1] - std::complex<double>(e2, 0.0));

  char detail[120];
  std::snprintf(detail, sizeof detail, "Airy deviations %.2e, %.2e (tolerance %.0e)", d1, d2,
                tolerance);
  return {d1 <= tolerance && d2 <= tolerance, detail};
}

// Criterion 3: parabolic solver at g = 0 returns -1/(2 n^2) for n <= 3 to 1e-10.
CriterionResult criterion_3() {
  constexpr double tolerance = 1e-10;
  double worst = 0.0;
  for (int n = 1; n <= 3; ++n)
    for (int m = -(n - 1); m <= n - 1; ++m)
      for (int n1 = 0; n1 + std::abs(m) <= n - 1; ++n1) {
        const ParabolicLabel label{n1, n - 1 - std::abs(m) - n1, m};
        const SeparationState state = solve_state(label, 0.0);
        const double expected = -0.5 / double(n * n);
        worst = std::max(worst, std::abs(state.energy - std::complex<double>(expected, 0.0)));
      }
  char detail[96];
  std::snprintf(detail, sizeof detail, "max deviation %.2e (tolerance %.0e)", worst, tolerance);
  return {worst <= tolerance, detail};
}

// Criterion 4: Im E(g)/g within [2.94, 3.06] for (n = 2, q = 1, m = 0) at
// g in {0.001, 0.002, 0.005}; the hydrogen g_c estimate is 0 within one grid
// step (grid [0, 0.05] in steps of 0.005).
CriterionResult criterion_4() {
  double slope_lo = std::numeric_limits<double>::infinity();
  double slope_hi = -slope_lo;
  for (double g : {0.001, 0.002, 0.005}) {
    const SeparationState state = solve_state({1, 0, 0}, g);
    const double slope = state.energy.imag() / g;
    slope_lo = std::min(slope_lo, slope);
    slope_hi = std::max(slope_hi, slope);
  }
  const bool slope_ok = slope_lo >= 2.94 && slope_hi <= 3.06;

  // The PT transition of the hydrogen pair sits at the Hermitian limit g = 0:
  // bracket the first imaginary onset on the grid and bisect.
  const double grid_step = 0.005;
  const SpectrumFn pair_solver = [](double g) {
    Spectrum spectrum;
    spectrum.g = g;
    const SeparationState up = solve_state({1, 0, 0}, g);
    const SeparationState down = solve_state({0, 1, 0}, g);
    spectrum.eigenvalues.resize(2);
    if (down.energy.imag() <= up.energy.imag())
      spectrum.eigenvalues << down.energy, up.energy;
    else
      spectrum.eigenvalues << up.energy, down.energy;
    return spectrum;
  };
  const GScan pair_scan = scan(pair_solver, linspace(0.0, 0.05, 11), 2, "hydrogen-pair");
  const auto estimates = detect_exceptional_points(pair_scan, 1e-7);
  std::vector<ExceptionalPointEstimate> refined;
  for (const auto& estimate : estimates)
    refined.push_back(refine_exceptional_point(pair_solver, estimate, 1e-6, 1e-7));
  const std::optional<double> gc = estimate_gc(refined);
  const bool gc_ok = gc.has_value() && *gc <= grid_step;

  char detail[160];
  std::snprintf(detail, sizeof detail,
                "Im E/g in [%.4f, %.4f] (need [2.94, 3.06]); g_c %s (need <= %.3f)", slope_lo,
                slope_hi, gc ? std::to_string(*gc).c_str() : "none", grid_step);
  return {slope_ok && gc_ok, detail};
}

// Criterion 5: hydrogen n = 2 first-order multiset equals {-3, 0, 0, 3} to 1e-6.
CriterionResult criterion_5() {
  constexpr double tolerance = 1e-6;
  const PerturbationReport report = hydrogen_shell_report(2);
  if (report.first_order.size() != 4) return {false, "expected a 4-state shell"};
  const double expected[] = {-3.0, 0.0, 0.0, 3.0};
  double worst = 0.0;
  for (int i = 0; i < 4; ++i)
    worst = std::max(worst, std::abs(report.first_order[i] - expected[i]));
  char detail[96];
  std::snprintf(detail, sizeof detail, "max deviation from {-3,0,0,3}: %.2e (tolerance %.0e)",
                worst, tolerance);
  return {worst <= tolerance && report.verdict == PerturbationVerdict::complex_for_small_g,
          detail};
}

// Criterion 6: the synthetic two-level pencil's exceptional point is located
// at 0.5 +- 1e-5; the first linear-potential m = 0 exceptional point moves by
// less than 5% between n_radial = 8 and n_radial = 12 (l_max = 6, 8 tracked
// trajectories, grid [0, 0.8] in steps of 0.01, refinement to 1e-4).
CriterionResult criterion_6() {
  Eigen::MatrixXd h0 = Eigen::MatrixXd::Zero(2, 2);
  h0(1, 1) = 1.0;
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(2, 2);
  z(0, 1) = z(1, 0) = 1.0;
  const MatrixPencil synthetic{Eigen::MatrixXd::Identity(2, 2), h0, z, BasisSpec{2.0, 0, 1, 1},
                               PotentialKind::linear};
  check_pencil_properties(synthetic, /*from_basis_spec=*/false);
  const SpectrumFn synthetic_solver = [&](double g) { return checked_solve(synthetic, g); };
  const GScan synthetic_scan = scan(synthetic_solver, linspace(0.0, 0.6, 13), 2);
  const auto synthetic_estimates = detect_exceptional_points(synthetic_scan, 1e-8);
  std::optional<double> synthetic_gc;
  if (!synthetic_estimates.empty())
    synthetic_gc = estimate_gc(
        {refine_exceptional_point(synthetic_solver, synthetic_estimates[0], 1e-6, 1e-8)});
  const bool synthetic_ok = synthetic_gc && std::abs(*synthetic_gc - 0.5) <= 1e-5;

  const auto first_linear_ep = [&](int n_radial) -> std::optional<double> {
    const MatrixPencil pencil = make_pencil(BasisSpec{2.0, 0, 6, n_radial}, PotentialKind::linear);
    const SpectrumFn solver = [&pencil](double g) { return checked_solve(pencil, g); };
    const GScan result = scan(solver, linspace(0.0, 0.8, 81), 8, "linear");
    std::vector<ExceptionalPointEstimate> refined;
    for (const auto& estimate : detect_exceptional_points(result, 1e-7))
      refined.push_back(refine_exceptional_point(solver, estimate, 1e-4, 1e-7));
    return estimate_gc(refined);
  };
  const std::optional<double> coarse = first_linear_ep(8);
  const std::optional<double> fine = first_linear_ep(12);
  bool stable = coarse && fine;
  double relative = std::numeric_limits<double>::quiet_NaN();
  if (stable) {
    relative = std::abs(*coarse - *fine) / std::min(*coarse, *fine);
    stable = relative <= 0.05;
  }

  char detail[200];
  std::snprintf(detail, sizeof detail,
                "synthetic g_c %s (need 0.5 +- 1e-5); linear g_c %.6f vs %.6f, drift %.1f%% "
                "(need <= 5%%)",
                synthetic_gc ? std::to_string(*synthetic_gc).c_str() : "none",
                coarse.value_or(std::numeric_limits<double>::quiet_NaN()),
                fine.value_or(std::numeric_limits<double>::quiet_NaN()), 100.0 * relative);
  return {synthetic_ok && stable, detail};
}

// Criterion 7: the property suite attached to every solve above.
CriterionResult criterion_7() {
  char detail[200];
  std::string first = properties.notes.empty() ? std::string("none") : properties.notes.front();
  std::snprintf(detail, sizeof detail,
                "%d solves, %d pencils checked, %d violations (first: %s)", properties.solves,
                properties.pencils, properties.violations, first.c_str());
  return {properties.solves > 0 && properties.violations == 0, detail};
}

// ---------------------------------------------------------------------------
// Criterion 8 drives the installed CLI binary and inspects its CSVs.

struct CsvData {
  std::vector<std::string> metadata;
  // fields per row, comments skipped
  std::vector<std::vector<std::string>> rows;
};

CsvData read_csv(const std::filesystem::path& path) {
  CsvData csv;
  std::ifstream file(path);
  std::string line;
  bool header_seen = false;
  while (std::getline(file, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      csv.metadata.push_back(line);
      continue;
    }
    if (!header_seen) {
      header_seen = true;  // column names
      continue;
    }
    std::vector<std::string> fields;
    std::istringstream stream(line);
    std::string field;
    while (std::getline(stream, field, ',')) fields.push_back(field);
    csv.rows.push_back(std::move(fields));
  }
  return csv;
}

int run_cli(const std::string& arguments) {
  const std::string command = cli_path + " " + arguments + " > /dev/null 2>&1";
  const int status = std::system(command.c_str());
  if (status == -1 || !WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
}

// One linear-potential scan at fixed m: a strictly positive all-real window,
// then complex-conjugate pair formation.
bool linear_scan_shows_transition(int m, std::string& note) {
  const std::filesystem::path out = work_dir / ("linear_m" + std::to_string(m) + ".csv");
  const int code =
      run_cli("linear --m " + std::to_string(m) + " --g-min 0 --g-max 1 --g-steps 101 -o " +
              out.string());
  if (code != 0) {
    note = "CLI exit " + std::to_string(code) + " for m = " + std::to_string(m);
    return false;
  }
  const CsvData csv = read_csv(out);

  std::map<double, std::vector<std::complex<double>>> by_g;
  for (const auto& row : csv.rows) {
    if (row.size() < 5 || row[4] == "gap") continue;
    by_g[std::strtod(row[0].c_str(), nullptr)].push_back(
        {std::strtod(row[2].c_str(), nullptr), std::strtod(row[3].c_str(), nullptr)});
  }

  double last_real = -1.0;
  std::optional<double> first_complex;
  bool conjugate_pair_seen = false;
  for (const auto& [g, values] : by_g) {
    double largest_im = 0.0;
    for (const std::complex<double>& e : values)
      largest_im = std::max(largest_im, std::abs(e.imag()));
    if (largest_im <= 1e-9 && !first_complex) last_real = g;
    if (largest_im > 1e-7) {
      if (!first_complex) first_complex = g;
      for (std::size_t i = 0; i < values.size() && !conjugate_pair_seen; ++i) {
        if (std::abs(values[i].imag()) <= 1e-7) continue;
        for (std::size_t j = 0; j < values.size(); ++j)
          if (i != j && std::abs(values[i] - std::conj(values[j])) < 1e-6) {
            conjugate_pair_seen = true;
            break;
          }
      }
    }
  }

  char buffer[160];
  std::snprintf(buffer, sizeof buffer,
                "m=%d real window through g=%.3f, complex from g=%s, conjugate pair %s", m,
                last_real, first_complex ? std::to_string(*first_complex).c_str() : "none",
                conjugate_pair_seen ? "yes" : "no");
  note = buffer;
  return last_real > 0.0 && first_complex && *first_complex > last_real && conjugate_pair_seen;
}

CriterionResult criterion_8() {
  std::string detail;
  bool ok = true;
  for (int m : {0, 1, 2}) {
    std::string note;
    const bool pass = linear_scan_shows_transition(m, note);
    ok = ok && pass;
    detail += (detail.empty() ? "" : "; ") + note;
  }

  const std::filesystem::path out = work_dir / "hydrogen_scan.csv";
  const int code =
      run_cli("hydrogen-parabolic --n-max 3 --g-min 0 --g-max 0.05 --g-steps 11 -o " +
              out.string());
  if (code != 0) return {false, detail + "; hydrogen CLI exit " + std::to_string(code)};
  const CsvData csv = read_csv(out);

  // Trajectory id -> electric quantum number q, parsed from the metadata.
  std::map<int, int> q_of;
  for (const std::string& line : csv.metadata) {
    int t = 0, n1 = 0, n2 = 0, m = 0, n = 0, q = 0;
    if (std::sscanf(line.c_str(), "# trajectory %d: n1=%d n2=%d m=%d n=%d q=%d", &t, &n1, &n2,
                    &m, &n, &q) == 6)
      q_of[t] = q;
  }
  bool labels_ok = q_of.size() == 10;  // states with n <= 3, m >= 0

  int checked_rows = 0;
  bool imaginary_everywhere = true;
  std::map<int, int> early_ok;  // q != 0 trajectory -> converged among two smallest g > 0
  for (const auto& row : csv.rows) {
    if (row.size() < 5) continue;
    const double g = std::strtod(row[0].c_str(), nullptr);
    const int trajectory = std::atoi(row[1].c_str());
    const bool ok_row = row[4] == "ok";
    if (q_of[trajectory] == 0 || g == 0.0) continue;
    if (ok_row && g <= 0.0101) ++early_ok[trajectory];
    if (!ok_row) continue;
    ++checked_rows;
    if (std::abs(std::strtod(row[3].c_str(), nullptr)) <= 1e-12) imaginary_everywhere = false;
  }
  int early_trajectories = 0;
  for (const auto& [trajectory, count] : early_ok)
    if (count >= 2) ++early_trajectories;
  const bool hydrogen_ok =
      labels_ok && checked_rows > 0 && imaginary_everywhere && early_trajectories == 6;

  char buffer[160];
  std::snprintf(buffer, sizeof buffer,
                "; hydrogen: %d q!=0 rows, Im != 0 %s, %d/6 trajectories alive early",
                checked_rows, imaginary_everywhere ? "everywhere" : "VIOLATED",
                early_trajectories);
  detail += buffer;
  return {ok && hydrogen_ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: acceptance <cli-binary> <scratch-dir>\n";
    return 64;
  }
  cli_path = argv[1];
  work_dir = argv[2];
  std::filesystem::create_directories(work_dir);

  struct Criterion {
    const char* name;
    CriterionResult (*run)();
  };
  const Criterion criteria[] = {
      {"1 oscillator exactness", criterion_1},
      {"2 linear potential unperturbed", criterion_2},
      {"3 hydrogen limits", criterion_3},
      {"4 broken PT symmetry of hydrogen", criterion_4},
      {"5 linear Stark pattern", criterion_5},
      {"6 exceptional-point machinery", criterion_6},
      {"7 property suites", criterion_7},
      {"8 figure reproduction", criterion_8},
  };

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    CriterionResult result;
    try {
      result = criterion.run();
    } catch (const std::exception& error) {
      result = {false, std::string("exception: ") + error.what()};
    }
    if (!result.pass) ++failures;
    std::cout << (result.pass ? "[PASS]" : "[FAIL]") << " criterion " << criterion.name << " — "
              << result.detail << "\n";
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) +
                " criterion(s) failed") << "\n";
  return failures;
}
