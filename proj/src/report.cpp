#include "dnr/report.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/core.h>
#include <fmt/ranges.h>

namespace dnr {

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::baseline: return "baseline";
    case RunMode::ga: return "ga";
    case RunMode::oracle: return "oracle";
    case RunMode::pf: return "pf";
  }
  return {};
}

RunReport make_report(const NetworkCase& network, RunMode mode, const Configuration& config,
                      const PowerFlowResult& result, const VoltageBand& band) {
  RunReport r;
  r.case_name = network.name;
  r.mode = mode;
  for (auto id : config.open()) r.open_branches.push_back(network.branch(id).label);
  for (auto id : config.closed()) r.closed_branches.push_back(network.branch(id).label);
  r.loss_kw = result.p_loss_kw;
  const auto extremes = voltage_extremes(result);
  r.min_voltage_pu = extremes.min_pu;
  r.max_voltage_pu = extremes.max_pu;
  r.min_voltage_node = network.node(extremes.argmin).label;
  r.voltage_violations = count_voltage_violations(result, band);
  r.iterations = result.iterations;
  return r;
}

nlohmann::json to_json(const RunReport& r) {
  nlohmann::json j;
  j["case"] = r.case_name;
  j["mode"] = to_string(r.mode);
  j["open_branches"] = r.open_branches;
  j["closed_branches"] = r.closed_branches;
  j["loss_kw"] = r.loss_kw;
  j["voltage"] = {{"min_pu", r.min_voltage_pu},
                  {"max_pu", r.max_voltage_pu},
                  {"min_node", r.min_voltage_node},
                  {"violations", r.voltage_violations}};
  j["iterations"] = r.iterations;
  j["seed"] = r.seed ? nlohmann::json(*r.seed) : nlohmann::json(nullptr);
  if (r.ga) {
    nlohmann::json history = nlohmann::json::array();
    for (const auto& h : r.ga->history) {
      history.push_back({{"best_fitness", h.best_fitness}, {"mean_fitness", h.mean_fitness}, {"valid_fraction", h.valid_fraction}});
    }
    j["ga"] = {{"generations_run", r.ga->generations_run},
               {"evaluations", r.ga->evaluations},
               {"validity_checks", r.ga->validity_checks},
               {"history", std::move(history)}};
  }
  if (r.oracle) {
    j["oracle"] = {{"valid_count", r.oracle->valid_count},
                   {"total_combinations", r.oracle->total_combinations},
                   {"matrix_tree_count", r.oracle->matrix_tree_count}};
  }
  j["wall_seconds"] = r.wall_seconds;
  return j;
}

void print_report(std::ostream& out, const RunReport& r) {
  out << fmt::format("case            {}\n", r.case_name);
  out << fmt::format("mode            {}\n", to_string(r.mode));
  out << fmt::format("open branches   {}\n", fmt::join(r.open_branches, ","));
  out << fmt::format("loss            {:.4f} kW\n", r.loss_kw);
  out << fmt::format("min voltage     {:.5f} pu at node {}\n", r.min_voltage_pu, r.min_voltage_node);
  out << fmt::format("max voltage     {:.5f} pu\n", r.max_voltage_pu);
  out << fmt::format("out of band     {} nodes\n", r.voltage_violations);
  if (r.seed) out << fmt::format("seed            {}\n", *r.seed);
  if (r.ga) {
    out << fmt::format("generations     {}\n", r.ga->generations_run);
    out << fmt::format("power flows     {}\n", r.ga->evaluations);
  }
  if (r.oracle) {
    out << fmt::format("radial configs  {}\n", r.oracle->valid_count);
    out << fmt::format("matrix-tree     {}\n", r.oracle->matrix_tree_count);
    out << fmt::format("combinations    {}\n", r.oracle->total_combinations);
  }
  out << fmt::format("wall time       {:.3f} s\n", r.wall_seconds);
}

void write_voltage_csv(std::ostream& out, const NetworkCase& network, const PowerFlowResult& before,
                       const PowerFlowResult* after) {
  out << (after ? "node,v_pu_before,v_pu_after\n" : "node,v_pu\n");
  for (const auto& node : network.nodes) {
    const auto k = node.id - 1;
    if (after) {
      out << fmt::format("{},{:.10f},{:.10f}\n", node.label, std::abs(before.v(k)), std::abs(after->v(k)));
    } else {
      out << fmt::format("{},{:.10f}\n", node.label, std::abs(before.v(k)));
    }
  }
}

void write_history_csv(std::ostream& out, const std::vector<GenerationStats>& history) {
  out << "generation,best_fitness,mean_fitness,valid_fraction\n";
  for (std::size_t g = 0; g < history.size(); ++g) {
    out << fmt::format("{},{:.12g},{:.12g},{:.6f}\n", g, history[g].best_fitness, history[g].mean_fitness,
                       history[g].valid_fraction);
  }
}

VoltageProfile read_voltage_csv(std::istream& in) {
  VoltageProfile profile;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("voltage profile: empty input");
  {
    std::stringstream header(line);
    std::string column;
    std::getline(header, column, ',');
    if (column != "node") throw ParseError("voltage profile: first column must be 'node'");
    while (std::getline(header, column, ',')) profile.columns.push_back(column);
  }
  profile.values.resize(profile.columns.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string field;
    std::getline(row, field, ',');
    profile.nodes.push_back(std::stol(field));
    for (auto& column : profile.values) {
      if (!std::getline(row, field, ',')) throw ParseError("voltage profile: short row");
      column.push_back(std::stod(field));
    }
  }
  return profile;
}

}  // namespace dnr
