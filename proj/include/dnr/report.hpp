#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dnr/ga.hpp"
#include "dnr/network.hpp"
#include "dnr/oracle.hpp"
#include "dnr/powerflow.hpp"

namespace dnr {

enum class RunMode { baseline, ga, oracle, pf };
std::string to_string(RunMode mode);

struct OracleSummary {
  std::uint64_t valid_count = 0;
  std::string total_combinations;
  std::string matrix_tree_count;
};

/// Everything a command prints or serializes. Branch and node identifiers are
/// the original labels from the case files.
struct RunReport {
  std::string case_name;
  RunMode mode = RunMode::baseline;
  std::vector<long> open_branches;
  std::vector<long> closed_branches;
  double loss_kw = 0.0;
  double min_voltage_pu = 0.0;
  double max_voltage_pu = 0.0;
  long min_voltage_node = 0;
  int voltage_violations = 0;
  int iterations = 0;
  std::optional<std::uint64_t> seed;
  std::optional<GAResult> ga;
  std::optional<OracleSummary> oracle;
  double wall_seconds = 0.0;
};

RunReport make_report(const NetworkCase& network, RunMode mode, const Configuration& config,
                      const PowerFlowResult& result, const VoltageBand& band = {});

nlohmann::json to_json(const RunReport& report);

/// Human-readable summary.
void print_report(std::ostream& out, const RunReport& report);

/// `node,v_pu` for one profile, `node,v_pu_before,v_pu_after` for two.
void write_voltage_csv(std::ostream& out, const NetworkCase& network, const PowerFlowResult& before,
                       const PowerFlowResult* after = nullptr);

/// `generation,best_fitness,mean_fitness,valid_fraction`
void write_history_csv(std::ostream& out, const std::vector<GenerationStats>& history);

/// Parses a voltage profile CSV back into columns (header names -> values).
struct VoltageProfile {
  std::vector<std::string> columns;
  std::vector<long> nodes;
  std::vector<std::vector<double>> values;  ///< one vector per non-node column
};
VoltageProfile read_voltage_csv(std::istream& in);

}  // namespace dnr
