#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dnr/network.hpp"
#include "dnr/powerflow.hpp"
#include "dnr/topology.hpp"

namespace dnr {

/// Binomial coefficient C(total, chosen), exact. Throws std::invalid_argument
/// when chosen > total or either is negative.
BigInt search_space_size(int total, int chosen);

using ConfigurationVisitor = std::function<void(const Configuration&)>;

/// Visits every radial configuration exactly once. Uses the fundamental-loop
/// product when the non-tie branches form a tree, else scans all subsets.
void enumerate_valid(const NetworkCase& network, const ConfigurationVisitor& visit);

/// Cartesian product of fundamental loops, one open branch per loop. A tuple is
/// kept only if it is the lexicographically first loop assignment of its open
/// set, so each set is visited once.
void enumerate_by_loops(const NetworkCase& network, const ConfigurationVisitor& visit);

/// Brute force over all C(E, V - 1) closed sets.
void enumerate_by_combinations(const NetworkCase& network, const ConfigurationVisitor& visit);

struct EnumerationReport {
  std::uint64_t valid_count = 0;
  BigInt total_combinations = 0;
  Configuration best;
  double best_loss_kw = 0.0;
  double runtime_seconds = 0.0;
};

struct OracleOptions {
  SweepOptions sweep{};
  unsigned threads = 0;  ///< 0 = hardware concurrency
};

/// Scores every radial configuration and returns the minimum-loss one. Losses
/// equal to within a micro-kW are tied and resolved by the lexicographically
/// smallest open set, so the result does not depend on partitioning.
EnumerationReport exhaustive_optimum(const NetworkCase& network, const OracleOptions& options = {});

}  // namespace dnr
