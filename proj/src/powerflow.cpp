#include "dnr/powerflow.hpp"

#include <algorithm>
#include <cmath>

namespace dnr {

using cd = std::complex<double>;

PowerFlowResult solve(const NetworkCase& network, const Configuration& config, const SweepOptions& options) {
  const auto tree = root_tree(network, config.closed());
  const auto n = network.num_nodes();
  const double load_base_kva = network.base_mva * 1000.0;

  Eigen::VectorXcd s_load(n);
  for (const auto& node : network.nodes) s_load(node.id - 1) = cd(node.p_kw, node.q_kvar) / load_base_kva;

  PowerFlowResult result;
  result.v = Eigen::VectorXcd::Constant(n, cd(options.source_voltage_pu, 0.0));
  result.i_branch = Eigen::VectorXcd::Zero(network.num_branches());
  Eigen::VectorXcd downstream(n);

  for (int iteration = 1; iteration <= options.max_iterations; ++iteration) {
    // Backward: accumulate load currents toward the root.
    downstream.setZero();
    for (auto it = tree.order.rbegin(); it != tree.order.rend(); ++it) {
      const auto k = *it - 1;
      if (*it == network.substation) continue;
      downstream(k) += std::conj(s_load(k) / result.v(k));
      downstream(tree.parent[k] - 1) += downstream(k);
    }
    // Forward: drop voltages away from the root.
    double max_dv = 0.0;
    for (auto node : tree.order) {
      if (node == network.substation) continue;
      const auto k = node - 1;
      const auto& b = network.branch(tree.parent_branch[k]);
      const cd updated = result.v(tree.parent[k] - 1) - b.z_pu() * downstream(k);
      // Written so a NaN mismatch sticks and fails the convergence test.
      if (const double dv = std::abs(updated - result.v(k)); !(dv <= max_dv)) max_dv = dv;
      result.v(k) = updated;
      result.i_branch(b.id - 1) = (b.to == node) ? downstream(k) : -downstream(k);
    }
    result.iterations = iteration;
    result.max_mismatch = max_dv;
    if (max_dv < options.tolerance) {
      result.converged = true;
      break;
    }
  }

  result.p_loss_kw = branch_loss_pu(network, config, result) * load_base_kva;
  return result;
}

double branch_loss_pu(const NetworkCase& network, const Configuration& config, const PowerFlowResult& result) {
  double loss = 0.0;
  for (auto id : config.closed()) loss += std::norm(result.i_branch(id - 1)) * network.branch(id).r_pu;
  return loss;
}

double substation_injection_pu(const NetworkCase& network, const Configuration& config, const PowerFlowResult& result) {
  cd leaving = 0.0;
  for (auto id : config.closed()) {
    const auto& b = network.branch(id);
    if (b.from == network.substation) leaving += result.i_branch(id - 1);
    if (b.to == network.substation) leaving -= result.i_branch(id - 1);
  }
  return (result.v(network.substation - 1) * std::conj(leaving)).real();
}

double power_balance_residual(const NetworkCase& network, const Configuration& config, const PowerFlowResult& result) {
  cd leaving = 0.0;
  double loss = 0.0;
  for (auto id : config.closed()) {
    const auto& b = network.branch(id);
    const cd current = (result.v(b.from - 1) - result.v(b.to - 1)) / b.z_pu();
    loss += std::norm(current) * b.r_pu;
    if (b.from == network.substation) leaving += current;
    if (b.to == network.substation) leaving -= current;
  }
  const double injected = (result.v(network.substation - 1) * std::conj(leaving)).real();
  double load = 0.0;
  for (const auto& node : network.nodes) load += node.p_kw;
  load /= network.base_mva * 1000.0;
  return std::abs(injected - load - loss);
}

VoltageExtremes voltage_extremes(const PowerFlowResult& result) {
  VoltageExtremes e;
  const Eigen::VectorXd magnitude = result.v.cwiseAbs();
  Eigen::Index argmin = 0;
  e.min_pu = magnitude.minCoeff(&argmin);
  e.max_pu = magnitude.maxCoeff();
  e.argmin = static_cast<NodeId>(argmin) + 1;
  return e;
}

double voltage_violation_pu(const PowerFlowResult& result, const VoltageBand& band) {
  const Eigen::ArrayXd magnitude = result.v.cwiseAbs().array();
  return (band.min_pu - magnitude).max(0.0).sum() + (magnitude - band.max_pu).max(0.0).sum();
}

int count_voltage_violations(const PowerFlowResult& result, const VoltageBand& band) {
  const Eigen::ArrayXd magnitude = result.v.cwiseAbs().array();
  return static_cast<int>(((magnitude < band.min_pu) || (magnitude > band.max_pu)).count());
}

}  // namespace dnr
