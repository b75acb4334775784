#include <CLI11.hpp>
#include <iostream>

#include "sjde/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Sequential joint detection and estimation: design, evaluate, compare"};
  app.require_subcommand(1);
  sjde::CommandOptions options;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", options.config_path, "experiment INI file")->required();
    cmd->add_option("--seed", options.seed, "master seed (overrides the config)");
    cmd->add_option("--out", options.out, "output directory");
    cmd->add_option("--threads", options.threads, "worker threads (0 = all cores)");
  };

  auto* design = app.add_subcommand("design", "tune cost coefficients");
  add_common(design);
  design->add_option("--runs", options.runs, "Monte-Carlo runs per iteration");

  auto* evaluate = app.add_subcommand("evaluate", "evaluate one policy");
  add_common(evaluate);
  evaluate->add_option("--runs", options.runs, "Monte-Carlo runs");
  evaluate->add_option("--policy", options.policy, "ao or two_step")
      ->check(CLI::IsMember({"ao", "two_step"}));
  evaluate->add_option("--coeffs", options.coeffs_path, "coefficients file (ao policy)");

  auto* compare = app.add_subcommand("compare", "evaluate the AO and two-step policies");
  add_common(compare);
  compare->add_option("--runs", options.runs, "Monte-Carlo runs");
  compare->add_option("--coeffs", options.coeffs_path, "coefficients file")->required();

  auto* map = app.add_subcommand("policy-map", "export AO actions over (n, xbar)");
  add_common(map);
  map->add_option("--coeffs", options.coeffs_path, "coefficients file")->required();

  auto* diag = app.add_subcommand("diagnostics", "Fisher information, KL tables, spot checks");
  add_common(diag);
  diag->add_option("--coeffs", options.coeffs_path, "coefficients file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sjde::kExitValidation;
  }
  const std::string name = app.get_subcommands().front()->get_name();
  return sjde::run_command(name, options, std::cout, std::cerr);
}
