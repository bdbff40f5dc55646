// plasmaeq: command-line driver for the equilibrium library.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "plasmaeq/cli/commands.hpp"

int main(int argc, char** argv) {
  namespace cli = plasmaeq::cli;
  CLI::App app{"Verify, transform, solve and export plasma equilibria"};
  app.set_version_flag("--version", std::string(plasmaeq::kToolVersion));
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand

  cli::Options opt;
  app.add_option("--config", opt.config_path, "Run configuration (TOML)")->check(CLI::ExistingFile);
  app.add_option("--output", opt.output_dir, "Output directory (overrides [output].dir)");
  app.add_option("--tolerance-scale", opt.tolerance_scale, "Multiply every check tolerance")
      ->check(CLI::PositiveNumber);
  app.add_option("--threads", opt.threads, "Worker threads for residual sweeps")->check(CLI::Range(1, 256));
  app.add_option("--seed", opt.seed, "Seed for random sample sets");
  app.add_option("--set", opt.overrides, "Override a config value, key.path=value (repeatable)");

  auto* roots = app.add_subcommand("roots", "Eigenvalues lambda_n of the vortex family");
  double R = 1.0;
  int n_max = 3;
  roots->add_option("--R", R, "Sphere radius")->check(CLI::PositiveNumber);
  roots->add_option("--n-max", n_max, "Number of eigenvalues")->check(CLI::Range(1, 1000));
  app.add_subcommand("verify", "Run the configured verification checks");
  app.add_subcommand("transform", "Apply the configured symmetry chain, re-verify and export");
  app.add_subcommand("solve-gs", "Grad-Shafranov solves with a convergence table");
  app.add_subcommand("export", "Write VTK / CSV samples and contour slices");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cli::kUsage;
  }
  if (roots->count("--R")) opt.R = R;
  if (roots->count("--n-max")) opt.n_max = n_max;
  const std::string cmd = app.get_subcommands().front()->get_name();
  return cli::run_command(cmd, opt, std::cout, std::cerr);
}
