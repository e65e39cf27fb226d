#pragma once

#include <complex>
#include <filesystem>
#include <string>
#include <vector>

#include "dnr/errors.hpp"

namespace dnr {

/// Contiguous 1-based identifiers assigned at ingestion.
using NodeId = int;
using BranchId = int;

struct Node {
  NodeId id = 0;
  long label = 0;  ///< identifier as written in the source data
  double p_kw = 0.0;
  double q_kvar = 0.0;
  bool is_substation = false;

  friend bool operator==(const Node&, const Node&) = default;
};

struct Branch {
  BranchId id = 0;
  long label = 0;
  NodeId from = 0;
  NodeId to = 0;
  double r_ohm = 0.0;
  double x_ohm = 0.0;
  double r_pu = 0.0;
  double x_pu = 0.0;
  bool is_tie = false;

  std::complex<double> z_pu() const { return {r_pu, x_pu}; }

  friend bool operator==(const Branch&, const Branch&) = default;
};

/// Electrical graph of a distribution feeder. Treated as immutable once built;
/// `nodes[id - 1]` and `branches[id - 1]` hold the entity with that id.
struct NetworkCase {
  std::string name;
  double base_kv = 12.66;
  double base_mva = 100.0;
  NodeId substation = 0;
  std::vector<Node> nodes;
  std::vector<Branch> branches;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_branches() const { return static_cast<int>(branches.size()); }
  /// Number of closed branches in any radial configuration (V - 1).
  int tree_size() const { return num_nodes() - 1; }

  const Node& node(NodeId id) const { return nodes.at(static_cast<std::size_t>(id - 1)); }
  const Branch& branch(BranchId id) const { return branches.at(static_cast<std::size_t>(id - 1)); }

  double impedance_base_ohm() const { return base_kv * base_kv / base_mva; }

  std::vector<BranchId> tie_branches() const;
  std::vector<BranchId> non_tie_branches() const;

  /// Translate source-file labels to ids; throw ValidationError on unknown labels.
  BranchId branch_by_label(long label) const;
  NodeId node_by_label(long label) const;

  friend bool operator==(const NetworkCase&, const NetworkCase&) = default;
};

// Raw rows as read from the case files. `row` is the 1-based line number,
// used in error messages.
struct BranchRecord {
  long label = 0;
  long from = 0;
  long to = 0;
  double r_ohm = 0.0;
  double x_ohm = 0.0;
  bool is_tie = false;
  int row = 0;
};

struct LoadRecord {
  long node = 0;
  double p_kw = 0.0;
  double q_kvar = 0.0;
  int row = 0;
};

struct SystemRecord {
  std::string name;
  double base_kv = 12.66;
  double base_mva = 100.0;
  std::vector<long> substations;
};

/// Builds a validated case from raw records: relabels nodes and branches to
/// contiguous ids (ascending by label) and fills per-unit impedances.
/// Throws ValidationError naming every offending row or entity.
NetworkCase build_case(const SystemRecord& system, const std::vector<BranchRecord>& branches,
                       const std::vector<LoadRecord>& loads);

std::vector<BranchRecord> read_branches(const std::filesystem::path& path);
std::vector<LoadRecord> read_loads(const std::filesystem::path& path);
SystemRecord read_system(const std::filesystem::path& path);

NetworkCase load_case(const std::filesystem::path& branch_file, const std::filesystem::path& load_file,
                      const std::filesystem::path& system_file);

/// Loads `branches.csv`, `loads.csv` and `system.json` from one directory.
NetworkCase load_case(const std::filesystem::path& case_dir);

/// Writes the three case files into `case_dir` using the original labels.
void save_case(const NetworkCase& network, const std::filesystem::path& case_dir);

struct Diagnostic {
  enum class Kind {
    bad_base,
    node_ids,
    branch_ids,
    unknown_endpoint,
    self_loop,
    bad_impedance,
    negative_load,
    substation_count,
    substation_load,
    disconnected,
    per_unit_mismatch,
  };
  Kind kind;
  std::string message;
};

/// Empty iff every structural invariant of the case holds.
std::vector<Diagnostic> validate_case(const NetworkCase& network);

}  // namespace dnr
