#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dnr/ga.hpp"

namespace dnr::cli {

enum ExitCode : int {
  ok = 0,
  usage_error = 1,
  data_error = 2,
  numeric_failure = 3,
};

struct Options {
  std::filesystem::path case_dir;
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> profile;
  std::optional<std::filesystem::path> history;
  std::optional<std::filesystem::path> config_file;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> seeds;  ///< "a..b" or "a,b,c"
  std::vector<long> open;            ///< original branch labels, for `pf`
  unsigned threads = 0;

  // Explicit GA flag values; unset fields fall back to the config file, then defaults.
  std::optional<int> population_size;
  std::optional<double> crossover_rate;
  std::optional<double> mutation_rate;
  std::optional<int> elite_count;
  std::optional<int> max_generations;
  std::optional<int> stagnation_limit;
  std::optional<std::string> penalty_mode;
};

/// "1..20" -> {1, ..., 20}; "3,5,9" -> {3, 5, 9}. Throws std::invalid_argument.
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

/// Config file < flags. Throws std::invalid_argument on bad values.
GAConfig resolve_ga_config(const Options& options);

int cmd_baseline(const Options& options, std::ostream& out, std::ostream& err);
int cmd_solve(const Options& options, std::ostream& out, std::ostream& err);
int cmd_oracle(const Options& options, std::ostream& out, std::ostream& err);
int cmd_pf(const Options& options, std::ostream& out, std::ostream& err);
int cmd_validate(const Options& options, std::ostream& out, std::ostream& err);

}  // namespace dnr::cli
