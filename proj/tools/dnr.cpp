// dnr: minimum-loss radial reconfiguration of distribution feeders.

#include <iostream>

#include <CLI11.hpp>

#include "dnr/cli.hpp"

namespace {

template <class T>
void optional_flag(CLI::App& app, const std::string& name, std::optional<T>& target, const std::string& help) {
  app.add_option_function<T>(name, [&target](const T& value) { target = value; }, help);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace dnr::cli;

  CLI::App app{"Distribution network reconfiguration for minimum active power loss"};
  app.require_subcommand(1);
  Options options;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--case", options.case_dir, "Case directory (branches.csv, loads.csv, system.json)")->required();
    cmd->add_option_function<std::string>("--out", [&](const std::string& p) { options.out = p; },
                                          "Write the JSON report here");
    cmd->add_option_function<std::string>("--profile", [&](const std::string& p) { options.profile = p; },
                                          "Write the node voltage profile CSV here");
  };

  auto* baseline = app.add_subcommand("baseline", "Power flow with every tie branch open");
  add_common(baseline);

  auto* solve = app.add_subcommand("solve", "Spanning-tree-filtered genetic search");
  add_common(solve);
  optional_flag(*solve, "--seed", options.seed, "RNG seed (default 42)");
  optional_flag(*solve, "--seeds", options.seeds, "Seed range a..b or list a,b,c: prints a per-seed summary");
  solve->add_option_function<std::string>("--config", [&](const std::string& p) { options.config_file = p; },
                                          "GA settings file (key = value)");
  solve->add_option_function<std::string>("--history", [&](const std::string& p) { options.history = p; },
                                          "Write the per-generation fitness CSV here");
  optional_flag(*solve, "--population", options.population_size, "population_size (default 50)");
  optional_flag(*solve, "--crossover-rate", options.crossover_rate, "crossover_rate (default 0.8)");
  optional_flag(*solve, "--mutation-rate", options.mutation_rate, "mutation_rate per offspring (default 0.2)");
  optional_flag(*solve, "--elite", options.elite_count, "elite_count (default 2)");
  optional_flag(*solve, "--generations", options.max_generations, "max_generations (default 200)");
  optional_flag(*solve, "--stagnation", options.stagnation_limit, "stagnation_limit (default 50)");
  optional_flag(*solve, "--penalty", options.penalty_mode, "penalty_mode: off | voltage (default off)");

  auto* oracle = app.add_subcommand("oracle", "Exhaustive enumeration of radial configurations");
  add_common(oracle);
  oracle->add_option("--threads", options.threads, "Worker threads (0 = all cores)");

  auto* pf = app.add_subcommand("pf", "Power flow for one configuration");
  add_common(pf);
  pf->add_option("--open", options.open, "Open branch labels, comma separated")->delimiter(',')->required();

  auto* validate = app.add_subcommand("validate", "Check case files and report topology facts");
  validate->add_option("--case", options.case_dir, "Case directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : usage_error;
  }

  if (*baseline) return cmd_baseline(options, std::cout, std::cerr);
  if (*solve) return cmd_solve(options, std::cout, std::cerr);
  if (*oracle) return cmd_oracle(options, std::cout, std::cerr);
  if (*pf) return cmd_pf(options, std::cout, std::cerr);
  if (*validate) return cmd_validate(options, std::cout, std::cerr);
  return usage_error;
}
