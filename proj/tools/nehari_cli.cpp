// SPDX-License-Identifier: Apache-2.0
#include <CLI11.hpp>

#include <iostream>

#include "nehari/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Nehari-manifold solver for quasilinear concave-convex Dirichlet problems"};
  app.require_subcommand(1);

  nehari::cli::Options opt;
  std::string config, out, field;

  auto add = [&](char const* name, char const* help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "INI run configuration (defaults when omitted)")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory (overrides [output] dir)");
    sub->add_flag("--force", opt.force, "solve even when lambda is not admissible");
    return sub;
  };
  add("verify-phi", "certify the phi hypotheses and report rho constants");
  add("thresholds", "compute lambda1, lambda2, lambda0, c1, delta");
  add("fibering", "classify the fibering map of a seed or loaded field")
      ->add_option("--field", field, "field CSV to analyse")
      ->check(CLI::ExistingFile);
  add("solve", "minimize the energy on both Nehari branches");
  add("gradcheck", "compare the energy gradient with finite differences");

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const& e) {
    return app.exit(e) == 0 ? 0 : nehari::cli::config_error;
  }

  opt.command = app.get_subcommands().front()->get_name();
  opt.config = config;
  if (!out.empty()) opt.out = out;
  if (!field.empty()) opt.field = field;
  return nehari::cli::run(opt, std::cerr);
}
