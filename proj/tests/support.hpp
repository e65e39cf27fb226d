#pragma once

#include <filesystem>
#include <string>
#include <tuple>
#include <vector>

#include "dnr/network.hpp"
#include "dnr/topology.hpp"

namespace dnr::test {

inline std::filesystem::path data_dir() { return DNR_DATA_DIR; }

inline const NetworkCase& case33() {
  static const NetworkCase c = load_case(data_dir() / "33bus");
  return c;
}

inline const NetworkCase& case69() {
  static const NetworkCase c = load_case(data_dir() / "69bus");
  return c;
}

struct Edge {
  long from;
  long to;
  double r = 1.0;
  double x = 0.5;
  bool tie = false;
};

struct Load {
  long node;
  double p_kw;
  double q_kvar = 0.0;
};

/// Base 1 kV / 1 MVA so ohms equal per-unit and 1000 kW is 1 pu.
inline NetworkCase make_network(const std::vector<Edge>& edges, const std::vector<Load>& loads = {},
                                long substation = 1) {
  SystemRecord sys;
  sys.name = "toy";
  sys.base_kv = 1.0;
  sys.base_mva = 1.0;
  sys.substations = {substation};
  std::vector<BranchRecord> branches;
  long label = 1;
  for (const auto& e : edges) branches.push_back({label++, e.from, e.to, e.r, e.x, e.tie, static_cast<int>(label)});
  std::vector<LoadRecord> load_rows;
  for (const auto& l : loads) load_rows.push_back({l.node, l.p_kw, l.q_kvar, 0});
  return build_case(sys, branches, load_rows);
}

/// Nodes 1-2-3-4-1; branch 4 (4-1) is the tie.
inline NetworkCase ring4(const std::vector<Load>& loads = {}) {
  return make_network({{1, 2}, {2, 3}, {3, 4}, {4, 1, 1.0, 0.5, true}}, loads);
}

inline NetworkCase complete4() {
  return make_network({{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}});
}

/// Connected random multigraph-free graph: a random tree plus extra edges
/// (which become ties), up to `edges` total.
inline NetworkCase random_graph(int nodes, int edges, Rng& rng) {
  std::vector<Edge> list;
  std::vector<std::pair<long, long>> used;
  auto has = [&](long a, long b) {
    for (auto [u, v] : used)
      if ((u == a && v == b) || (u == b && v == a)) return true;
    return false;
  };
  for (long v = 2; v <= nodes; ++v) {
    std::uniform_int_distribution<long> parent(1, v - 1);
    const long p = parent(rng);
    used.emplace_back(p, v);
    list.push_back({p, v});
  }
  std::uniform_int_distribution<long> pick(1, nodes);
  int guard = 0;
  while (static_cast<int>(list.size()) < edges && guard++ < 1000) {
    const long a = pick(rng);
    const long b = pick(rng);
    if (a == b || has(a, b)) continue;
    used.emplace_back(a, b);
    list.push_back({a, b, 1.0, 0.5, true});
  }
  return make_network(list);
}

/// Independent radiality check: edge count, then breadth-first reachability
/// from the substation, then cycle detection by depth-first parent tracking.
inline bool reference_is_tree(const NetworkCase& net, const std::vector<BranchId>& closed) {
  const int n = net.num_nodes();
  if (static_cast<int>(closed.size()) != n - 1) return false;
  std::vector<std::vector<std::pair<int, BranchId>>> adj(static_cast<std::size_t>(n) + 1);
  for (auto id : closed) {
    const auto& b = net.branch(id);
    adj[b.from].emplace_back(b.to, id);
    adj[b.to].emplace_back(b.from, id);
  }
  std::vector<int> seen(static_cast<std::size_t>(n) + 1, 0);
  std::vector<std::pair<int, BranchId>> stack{{net.substation, 0}};
  seen[net.substation] = 1;
  int reached = 1;
  bool cycle = false;
  while (!stack.empty()) {
    auto [u, via] = stack.back();
    stack.pop_back();
    for (auto [v, id] : adj[u]) {
      if (id == via) continue;
      if (seen[v]) {
        cycle = true;
        continue;
      }
      seen[v] = 1;
      ++reached;
      stack.emplace_back(v, id);
    }
  }
  return reached == n && !cycle;
}

}  // namespace dnr::test
