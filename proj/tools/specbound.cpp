#include <CLI11.hpp>
#include <iostream>

#include "specbound/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"specbound: spectral thresholds of magnetic Schroedinger operators"};
  app.require_subcommand(1);
  app.set_version_flag("--version", specbound::kToolVersion);

  auto* run = app.add_subcommand("run", "run a scenario file");
  std::string config, out, format = "json";
  specbound::RunOptions opt;
  run->add_option("config", config, "scenario file (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "report path")->required();
  run->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  run->add_option("--threads", opt.threads, "concurrent channel solves (default: logical cores)")
      ->check(CLI::PositiveNumber);
  run->add_option("--seed", opt.seed, "random seed (default 42)");
  run->add_flag("--timing", opt.timing, "record wall time in the provenance block");

  auto* list = app.add_subcommand("list-scenarios", "print every scenario kind and its keys");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (list->parsed()) {
    std::cout << specbound::list_scenarios();
    return 0;
  }
  return specbound::run(config, out, format, opt);
}
