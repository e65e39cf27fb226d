#include "dnr/cli.hpp"

#include <chrono>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/core.h>
#include <fmt/ranges.h>

#include "dnr/oracle.hpp"
#include "dnr/report.hpp"

namespace dnr::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Library exceptions mapped onto exit codes.
template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return data_error;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return data_error;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return data_error;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return usage_error;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return numeric_failure;
  }
}

void write_outputs(const Options& options, const RunReport& report) {
  if (options.out) {
    std::ofstream out(*options.out);
    if (!out) throw ParseError(fmt::format("{}: cannot write report", options.out->string()));
    out << to_json(report).dump(2) << "\n";
  }
}

void write_profile(const Options& options, const NetworkCase& network, const PowerFlowResult& before,
                   const PowerFlowResult* after) {
  if (!options.profile) return;
  std::ofstream out(*options.profile);
  if (!out) throw ParseError(fmt::format("{}: cannot write profile", options.profile->string()));
  write_voltage_csv(out, network, before, after);
}

PowerFlowResult converged_solve(const NetworkCase& network, const Configuration& config) {
  auto result = solve(network, config);
  if (!result.converged) {
    throw std::runtime_error(fmt::format("power flow did not converge after {} iterations (max |dV| = {:.3e} pu)",
                                         result.iterations, result.max_mismatch));
  }
  return result;
}

}  // namespace

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    std::uint64_t v = 0;
    try {
      v = std::stoull(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw std::invalid_argument(fmt::format("bad seed '{}'", s));
    return v;
  };
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const auto lo = number(text.substr(0, dots));
    const auto hi = number(text.substr(dots + 2));
    if (lo > hi) throw std::invalid_argument(fmt::format("empty seed range '{}'", text));
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) seeds.push_back(number(item));
  if (seeds.empty()) throw std::invalid_argument("empty seed list");
  return seeds;
}

GAConfig resolve_ga_config(const Options& o) {
  GAConfig config;
  if (o.config_file) {
    std::ifstream in(*o.config_file);
    if (!in) throw std::invalid_argument(fmt::format("{}: cannot open config file", o.config_file->string()));
    config = parse_ga_config(in, config);
  }
  if (o.population_size) config.population_size = *o.population_size;
  if (o.crossover_rate) config.crossover_rate = *o.crossover_rate;
  if (o.mutation_rate) config.mutation_rate = *o.mutation_rate;
  if (o.elite_count) config.elite_count = *o.elite_count;
  if (o.max_generations) config.max_generations = *o.max_generations;
  if (o.stagnation_limit) config.stagnation_limit = *o.stagnation_limit;
  if (o.penalty_mode) config.penalty_mode = parse_penalty_mode(*o.penalty_mode);
  if (o.seed) config.seed = *o.seed;
  config.validate();
  return config;
}

int cmd_baseline(const Options& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto start = Clock::now();
    const auto network = load_case(options.case_dir);
    const auto config = Configuration::base(network);
    const auto result = converged_solve(network, config);
    auto report = make_report(network, RunMode::baseline, config, result);
    report.wall_seconds = seconds_since(start);
    print_report(out, report);
    write_outputs(options, report);
    write_profile(options, network, result, nullptr);
    return static_cast<int>(ok);
  });
}

int cmd_solve(const Options& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (options.seed && options.seeds) throw std::invalid_argument("--seed and --seeds are mutually exclusive");
    if (options.seeds && (options.history || options.profile)) {
      throw std::invalid_argument("--history and --profile apply to single-seed runs only");
    }
    const auto base_config = resolve_ga_config(options);
    const auto seeds = options.seeds ? parse_seed_list(*options.seeds) : std::vector<std::uint64_t>{base_config.seed};

    const auto network = load_case(options.case_dir);
    const auto baseline = converged_solve(network, Configuration::base(network));

    if (seeds.size() > 1) {
      const auto start = Clock::now();
      nlohmann::json runs = nlohmann::json::array();
      out << fmt::format("{:>8}  {:>12}  {:>6}  {:>8}  {}\n", "seed", "loss_kw", "gens", "pf_calls", "open");
      for (auto seed : seeds) {
        auto config = base_config;
        config.seed = seed;
        const auto ga = run(network, config);
        std::vector<long> open;
        for (auto id : ga.best.open()) open.push_back(network.branch(id).label);
        out << fmt::format("{:>8}  {:>12.4f}  {:>6}  {:>8}  {}\n", seed, ga.best_loss_kw, ga.generations_run,
                           ga.evaluations, fmt::join(open, ","));
        runs.push_back({{"seed", seed}, {"loss_kw", ga.best_loss_kw}, {"open_branches", open},
                        {"generations_run", ga.generations_run}, {"evaluations", ga.evaluations}});
      }
      out << fmt::format("wall time {:.3f} s\n", seconds_since(start));
      if (options.out) {
        std::ofstream file(*options.out);
        file << nlohmann::json{{"case", network.name}, {"mode", "ga"}, {"runs", runs}}.dump(2) << "\n";
      }
      return static_cast<int>(ok);
    }

    const auto start = Clock::now();
    const auto ga = run(network, base_config);
    const auto result = converged_solve(network, ga.best);
    auto report = make_report(network, RunMode::ga, ga.best, result);
    report.seed = ga.seed;
    report.ga = ga;
    report.wall_seconds = seconds_since(start);
    print_report(out, report);
    write_outputs(options, report);
    write_profile(options, network, baseline, &result);
    if (options.history) {
      std::ofstream file(*options.history);
      write_history_csv(file, ga.history);
    }
    return static_cast<int>(ok);
  });
}

int cmd_oracle(const Options& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto start = Clock::now();
    const auto network = load_case(options.case_dir);
    OracleOptions oracle_options;
    oracle_options.threads = options.threads;
    const auto enumeration = exhaustive_optimum(network, oracle_options);
    const auto result = converged_solve(network, enumeration.best);
    auto report = make_report(network, RunMode::oracle, enumeration.best, result);
    report.oracle = OracleSummary{enumeration.valid_count, enumeration.total_combinations.str(),
                                  count_spanning_trees(network).str()};
    report.wall_seconds = seconds_since(start);
    print_report(out, report);
    write_outputs(options, report);
    write_profile(options, network, converged_solve(network, Configuration::base(network)), &result);
    return static_cast<int>(ok);
  });
}

int cmd_pf(const Options& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto start = Clock::now();
    const auto network = load_case(options.case_dir);
    std::vector<BranchId> open;
    for (auto label : options.open) open.push_back(network.branch_by_label(label));
    const int expected = network.num_branches() - network.tree_size();
    if (static_cast<int>(open.size()) != expected) {
      throw PreconditionError(fmt::format("--open must list exactly {} branches, got {}", expected, open.size()));
    }
    const auto config = Configuration::from_open(network, open);
    if (const auto check = check_radiality(network, config.closed()); !check.ok()) {
      throw PreconditionError("configuration is not radial: " + check.describe(network));
    }
    const auto result = converged_solve(network, config);
    auto report = make_report(network, RunMode::pf, config, result);
    report.wall_seconds = seconds_since(start);
    print_report(out, report);
    write_outputs(options, report);
    write_profile(options, network, result, nullptr);
    return static_cast<int>(ok);
  });
}

int cmd_validate(const Options& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto network = load_case(options.case_dir);
    const auto trees = count_spanning_trees(network);
    out << fmt::format("{}: {} nodes, {} branches ({} ties), base {} kV / {} MVA\n", network.name, network.num_nodes(),
                       network.num_branches(), network.tie_branches().size(), network.base_kv, network.base_mva);
    out << fmt::format("non-tie branches form a spanning tree: {}\n",
                       is_spanning_tree(network, network.non_tie_branches()) ? "yes" : "no");
    out << fmt::format("spanning trees: {}\n", trees.str());
    out << "valid\n";
    return static_cast<int>(ok);
  });
}

}  // namespace dnr::cli
