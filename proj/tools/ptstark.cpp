// Batch front end: build the requested model, run solves, scans, or
// perturbation analyses, and write deterministic CSV (optionally SVG).
// Exit status: 0 success, 2 configuration error, 3 numerical failure.

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <string>

#include "ptstark/ptstark.hpp"

namespace {

void add_basis_flags(CLI::App* command, ptstark::RunConfig& config) {
  command->add_option("--alpha", config.alpha, "Shared Slater exponent")
      ->capture_default_str();
  command->add_option("--m", config.m, "Magnetic quantum number")->capture_default_str();
  command->add_option("--l-max", config.l_max, "Largest angular momentum (default |m| + 6)");
  command->add_option("--n-radial", config.n_radial, "Radial functions per angular momentum")
      ->capture_default_str();
}

void add_grid_flags(CLI::App* command, ptstark::RunConfig& config) {
  command->add_option("--g", config.g, "Single coupling value instead of a grid");
  command->add_option("--g-min", config.g_min, "Coupling grid start")->capture_default_str();
  command->add_option("--g-max", config.g_max, "Coupling grid end (default 1; 0.1 for hydrogen-parabolic)");
  command->add_option("--g-steps", config.g_steps, "Coupling grid point count")
      ->capture_default_str();
}

void add_track_flag(CLI::App* command, ptstark::RunConfig& config) {
  command->add_option("--n-track,--levels", config.n_track,
                      "Number of lowest levels to track (default min(8, dimension))");
}

void add_output_flags(CLI::App* command, ptstark::RunConfig& config) {
  command->add_option("--output,-o", config.output_path, "Output CSV path (default <command>.csv)");
  command->add_flag("--svg", config.emit_svg, "Also write a polyline SVG plot next to the CSV");
  command->add_option("--config", "Optional key=value config file; flags take precedence");
}

std::string trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r");
  const auto end = text.find_last_not_of(" \t\r");
  return begin == std::string::npos ? std::string{} : text.substr(begin, end - begin + 1);
}

// CLI11 only processes a config option registered on the root application,
// while ours live on the subcommands with plain key=value semantics. Apply the
// file by hand: each key names a long option of the active subcommand and is
// converted by that option itself; values given on the command line win.
int apply_config_file(CLI::App* command) {
  CLI::Option* config_option = command->get_option_no_throw("--config");
  if (config_option == nullptr || config_option->count() == 0) return 0;
  const auto path = config_option->as<std::string>();
  std::ifstream file(path);
  if (!file) {
    std::cerr << "config error: cannot read " << path << "\n";
    return 2;
  }
  std::string line;
  while (std::getline(file, line)) {
    const std::string entry = trim(line);
    if (entry.empty() || entry[0] == '#') continue;
    const auto split = entry.find('=');
    if (split == std::string::npos) {
      std::cerr << "config error: expected key=value in " << path << ": " << entry << "\n";
      return 2;
    }
    const std::string key = trim(entry.substr(0, split));
    std::string value = trim(entry.substr(split + 1));
    // Option names use dashes, but the CSV metadata echoes them with
    // underscores; accept either spelling so metadata round-trips.
    std::string name = "--" + key;
    std::replace(name.begin(), name.end(), '_', '-');
    CLI::Option* option = command->get_option_no_throw(name);
    if (option == nullptr || option == config_option) {
      std::cerr << "config error: unknown key in " << path << ": " << key << "\n";
      return 2;
    }
    if (option->count() > 0) continue;  // flags take precedence
    try {
      if (option->get_expected_max() == 0)
        value = option->get_flag_value(name, value.empty() ? "true" : value);
      option->add_result(value);
      option->run_callback();
    } catch (const CLI::Error& error) {
      std::cerr << "config error: bad value for " << key << " in " << path << ": "
                << error.what() << "\n";
      return 2;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  ptstark::RunConfig config;
  CLI::App app{"Spectra of PT-symmetric Hamiltonians p^2/2 + V(r) + i g z"};
  app.set_version_flag("--version", ptstark::version());
  app.require_subcommand(1);

  CLI::App* ho = app.add_subcommand("ho", "Harmonic oscillator V = r^2/2: scan or single solve");
  CLI::App* coulomb = app.add_subcommand("coulomb", "Coulomb V = -1/r: scan or single solve");
  CLI::App* linear = app.add_subcommand("linear", "Linear V = r: scan or single solve");
  for (CLI::App* command : {ho, coulomb, linear}) {
    add_basis_flags(command, config);
    add_grid_flags(command, config);
    add_track_flag(command, config);
    add_output_flags(command, config);
  }

  CLI::App* scan = app.add_subcommand(
      "scan", "Scan a potential and locate exceptional points (g_c estimate)");
  add_basis_flags(scan, config);
  add_grid_flags(scan, config);
  add_track_flag(scan, config);
  scan->add_option("--model", config.model, "Potential: ho, coulomb, or linear (default linear)");
  scan->add_option("--im-tol", config.im_tol,
                   "|Im E| threshold separating real from complex eigenvalues")
      ->capture_default_str();
  add_output_flags(scan, config);

  CLI::App* perturb =
      app.add_subcommand("perturb", "First-order degenerate corrections at g = 0");
  add_basis_flags(perturb, config);
  perturb->add_option("--model", config.model,
                      "Model: ho, linear, or hydrogen (default hydrogen)");
  perturb->add_option("--n", config.n_shell, "Principal quantum number for --model hydrogen")
      ->capture_default_str();
  add_track_flag(perturb, config);
  add_output_flags(perturb, config);

  CLI::App* hydrogen = app.add_subcommand(
      "hydrogen-parabolic", "Hydrogen Stark states via parabolic separation");
  add_grid_flags(hydrogen, config);
  hydrogen->add_option("--n-max", config.n_max, "Include all states with n <= n-max")
      ->capture_default_str();
  hydrogen->add_option("--basis-size", config.basis_size, "Channel oscillator basis size")
      ->capture_default_str();
  add_output_flags(hydrogen, config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& help) {
    return app.exit(help);
  } catch (const CLI::CallForVersion& version_request) {
    return app.exit(version_request);
  } catch (const CLI::ParseError& error) {
    app.exit(error);
    return 2;
  }

  for (CLI::App* command : {ho, coulomb, linear, scan, perturb, hydrogen}) {
    if (command->parsed()) {
      if (const int code = apply_config_file(command); code != 0) return code;
      config.command = command->get_name();
      return ptstark::run(config);
    }
  }
  return 2;
}
