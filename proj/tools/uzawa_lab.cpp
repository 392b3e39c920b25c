// Command-line front end: uzawa_lab <subcommand> --config <path> --out <dir>

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "uzawa/config.hpp"
#include "uzawa/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Steady-state growth laboratory: Solow/Swan simulations, balanced growth detection, "
               "transport-equation checks and convergence timescales"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  long seed = 0;
  for (const auto& name : uzawa::subcommands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "scenario file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory")->required();
    sub->add_option("--seed", seed, "accepted and ignored; every run is deterministic");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string name = app.get_subcommands().front()->get_name();

  uzawa::ScenarioConfig cfg;
  try {
    cfg = uzawa::parse_config(config_path);
  } catch (const uzawa::ConfigParseError& e) {
    std::cerr << config_path << ": configuration rejected\n";
    for (const auto& issue : e.issues()) {
      std::cerr << "  ";
      if (issue.line) std::cerr << "line " << issue.line << ": ";
      std::cerr << issue.message << '\n';
    }
    return uzawa::kExitError;
  }
  return uzawa::run_subcommand(name, cfg, out_dir, std::cerr);
}
