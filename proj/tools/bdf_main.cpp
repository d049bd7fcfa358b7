#include <CLI11.hpp>
#include <iostream>

#include "bdf/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Bogoliubov-Dirac-Fock graphene scenario runner"};
  app.set_version_flag("--version", bdf::runner::version());
  app.require_subcommand(1);

  bdf::runner::RunOptions options;
  std::string out_dir;
  std::uint64_t seed = 0;
  const std::pair<const char*, const char*> subs[] = {
      {"gfunc", "tabulate g(R) over the configured ladder"},
      {"veff", "tabulate v_eff and the Kohn residual"},
      {"critical", "estimate h(v_F) and the critical velocity v_c"},
      {"scf", "solve for the self-consistent ground state"},
      {"evolve", "propagate the time-dependent equation"},
      {"check", "run the invariant suite on a seeded random state"}};
  for (const auto& [name, help] : subs) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", options.config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_dir, "output directory (overrides the config)");
    sub->add_option("--seed", seed, "RNG seed (overrides the config)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : bdf::runner::ExitCode::config_error;
  }

  const auto* sub = app.get_subcommands().front();
  if (sub->count("--out")) options.output_dir = out_dir;
  if (sub->count("--seed")) options.seed = seed;
  try {
    return bdf::runner::run(sub->get_name(), options);
  } catch (const std::exception& e) {
    std::cerr << "bdf: " << e.what() << '\n';
    return bdf::runner::ExitCode::invariant_violation;
  }
}
