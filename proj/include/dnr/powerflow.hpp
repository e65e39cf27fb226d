#pragma once

#include <Eigen/Dense>

#include "dnr/network.hpp"
#include "dnr/topology.hpp"

namespace dnr {

struct SweepOptions {
  double tolerance = 1e-6;  ///< max per-node |dV| between sweeps, per-unit
  int max_iterations = 100;
  double source_voltage_pu = 1.0;
};

struct PowerFlowResult {
  Eigen::VectorXcd v;         ///< node voltages, indexed by node id - 1
  Eigen::VectorXcd i_branch;  ///< from->to current, indexed by branch id - 1; zero when open
  double p_loss_kw = 0.0;
  bool converged = false;
  int iterations = 0;
  double max_mismatch = 0.0;  ///< last max |dV|
};

/// Backward/forward sweep with constant-power loads from a flat start.
/// Throws PreconditionError if the configuration is not radial; reports
/// non-convergence through `converged` rather than throwing.
PowerFlowResult solve(const NetworkCase& network, const Configuration& config,
                      const SweepOptions& options = {});

/// Sum of I^2 R over closed branches, per-unit.
double branch_loss_pu(const NetworkCase& network, const Configuration& config,
                      const PowerFlowResult& result);

/// Active power entering the network at the substation, per-unit.
double substation_injection_pu(const NetworkCase& network, const Configuration& config,
                               const PowerFlowResult& result);

/// |P_injected - P_load - P_loss| in per-unit, with branch currents re-derived
/// from the solved voltages via each branch's impedance.
double power_balance_residual(const NetworkCase& network, const Configuration& config,
                              const PowerFlowResult& result);

struct VoltageExtremes {
  double min_pu = 0.0;
  double max_pu = 0.0;
  NodeId argmin = 0;
};

VoltageExtremes voltage_extremes(const PowerFlowResult& result);

struct VoltageBand {
  double min_pu = 0.95;
  double max_pu = 1.05;
};

/// Total magnitude by which node voltages leave the band, per-unit.
double voltage_violation_pu(const PowerFlowResult& result, const VoltageBand& band = {});
int count_voltage_violations(const PowerFlowResult& result, const VoltageBand& band = {});

}  // namespace dnr
