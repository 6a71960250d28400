#include <CLI11.hpp>
#include <iostream>

#include "fastslow/errors.hpp"
#include "fastslow/lab/commands.hpp"
#include "fastslow/lab/config.hpp"

namespace lab = fastslow::lab;

int main(int argc, char** argv) {
  CLI::App app{"Fast-slow Hamiltonian lab"};
  app.require_subcommand(1);

  std::string config_path, out_dir, epsilon_list, preset;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "configuration file (section.key = value)");
    sub->add_option("--out", out_dir, "output directory (overrides output.directory)");
    sub->add_option("--epsilon", epsilon_list, "comma-separated epsilon list (overrides run.epsilons)");
    sub->add_option("--preset", preset, "frequency preset: constant, sine, custom");
  };
  struct Command {
    const char* name;
    const char* help;
    int (*run)(const lab::RunConfig&, std::ostream&);
  };
  const Command commands[] = {
      {"simulate", "integrate the full, homogenized and averaged systems", lab::cmd_simulate},
      {"sweep", "residual norms and convergence orders across epsilon", lab::cmd_sweep},
      {"thermo", "thermodynamic expansion, first law and equipartition", lab::cmd_thermo},
      {"twoscale", "nonlinear two-scale errors of the scaled differences", lab::cmd_twoscale},
      {"check", "analytic identity suite", lab::cmd_check},
  };
  for (const auto& c : commands) add_common(app.add_subcommand(c.name, c.help));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : lab::kConfigError;
  }

  try {
    lab::RunConfig cfg = config_path.empty() ? lab::RunConfig{} : lab::load_config(config_path);
    if (!preset.empty()) lab::override_preset(cfg, fastslow::parse_preset(preset));
    if (!epsilon_list.empty()) cfg.epsilons = lab::parse_real_list(epsilon_list);
    if (!out_dir.empty()) cfg.output_directory = out_dir;
    cfg.validate();
    for (const auto& c : commands) {
      if (app.got_subcommand(c.name)) return c.run(cfg, std::cout);
    }
  } catch (const fastslow::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return lab::kConfigError;
  } catch (const fastslow::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return lab::kNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return lab::kNumericalFailure;
  }
  return lab::kConfigError;
}
