#include "dnr/topology.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/core.h>

#include "dnr/disjoint_set.hpp"

namespace dnr {

namespace {

void require_known(const NetworkCase& network, BranchId id) {
  if (id < 1 || id > network.num_branches()) {
    throw PreconditionError(fmt::format("unknown branch id {} (case has {} branches)", id, network.num_branches()));
  }
}

std::vector<BranchId> complement(const NetworkCase& network, const std::vector<BranchId>& sorted_ids) {
  std::vector<BranchId> all(static_cast<std::size_t>(network.num_branches()));
  std::iota(all.begin(), all.end(), 1);
  std::vector<BranchId> rest;
  std::set_difference(all.begin(), all.end(), sorted_ids.begin(), sorted_ids.end(), std::back_inserter(rest));
  return rest;
}

std::vector<BranchId> sorted_unique(const NetworkCase& network, std::vector<BranchId> ids) {
  for (auto id : ids) require_known(network, id);
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw PreconditionError("configuration lists a branch more than once");
  }
  return ids;
}

}  // namespace

Configuration Configuration::from_closed(const NetworkCase& network, std::vector<BranchId> closed) {
  closed = sorted_unique(network, std::move(closed));
  if (static_cast<int>(closed.size()) != network.tree_size()) {
    throw PreconditionError(fmt::format("configuration must close exactly {} branches, got {}", network.tree_size(), closed.size()));
  }
  Configuration c;
  c.open_ = complement(network, closed);
  c.closed_ = std::move(closed);
  return c;
}

Configuration Configuration::from_open(const NetworkCase& network, std::vector<BranchId> open) {
  open = sorted_unique(network, std::move(open));
  const int expected = network.num_branches() - network.tree_size();
  if (static_cast<int>(open.size()) != expected) {
    throw PreconditionError(fmt::format("configuration must open exactly {} branches, got {}", expected, open.size()));
  }
  Configuration c;
  c.closed_ = complement(network, open);
  c.open_ = std::move(open);
  return c;
}

Configuration Configuration::base(const NetworkCase& network) {
  return from_open(network, network.tie_branches());
}

std::string RadialityCheck::describe(const NetworkCase& network) const {
  switch (status) {
    case Status::radial:
      return "radial";
    case Status::wrong_size:
      return fmt::format("a radial configuration closes exactly {} branches", network.tree_size());
    case Status::loop:
      return fmt::format("closing branch {} creates a loop; node {} is islanded",
                         network.branch(loop_branch).label, network.node(island_node).label);
    case Status::island:
      return fmt::format("node {} is not connected to the substation", network.node(island_node).label);
  }
  return {};
}

RadialityCheck check_radiality(const NetworkCase& network, std::span<const BranchId> closed) {
  for (auto id : closed) require_known(network, id);
  RadialityCheck result;
  if (static_cast<int>(closed.size()) != network.tree_size()) {
    result.status = RadialityCheck::Status::wrong_size;
    return result;
  }
  DisjointSet dsu(network.num_nodes());
  for (auto id : closed) {
    const auto& b = network.branch(id);
    if (!dsu.unite(b.from - 1, b.to - 1) && result.loop_branch == 0) {
      result.status = RadialityCheck::Status::loop;
      result.loop_branch = id;
    }
  }
  if (dsu.components() != 1) {
    if (result.status == RadialityCheck::Status::radial) result.status = RadialityCheck::Status::island;
    const int root = dsu.find(network.substation - 1);
    for (const auto& n : network.nodes) {
      if (dsu.find(n.id - 1) != root) {
        result.island_node = n.id;
        break;
      }
    }
  }
  return result;
}

bool is_spanning_tree(const NetworkCase& network, std::span<const BranchId> closed) {
  for (auto id : closed) require_known(network, id);
  if (static_cast<int>(closed.size()) != network.tree_size()) return false;
  DisjointSet dsu(network.num_nodes());
  for (auto id : closed) {
    const auto& b = network.branch(id);
    if (!dsu.unite(b.from - 1, b.to - 1)) return false;
  }
  return dsu.components() == 1;
}

std::vector<BranchId> random_spanning_tree_branches(const NetworkCase& network, Rng& rng) {
  std::vector<BranchId> order(static_cast<std::size_t>(network.num_branches()));
  std::iota(order.begin(), order.end(), 1);
  std::shuffle(order.begin(), order.end(), rng);
  DisjointSet dsu(network.num_nodes());
  std::vector<BranchId> accepted;
  accepted.reserve(static_cast<std::size_t>(network.tree_size()));
  for (auto id : order) {
    const auto& b = network.branch(id);
    if (dsu.unite(b.from - 1, b.to - 1)) {
      accepted.push_back(id);
      if (static_cast<int>(accepted.size()) == network.tree_size()) break;
    }
  }
  if (static_cast<int>(accepted.size()) != network.tree_size()) {
    throw PreconditionError("network is disconnected; no spanning tree exists");
  }
  return accepted;
}

Configuration random_spanning_tree(const NetworkCase& network, Rng& rng) {
  return Configuration::from_closed(network, random_spanning_tree_branches(network, rng));
}

RootedTree root_tree(const NetworkCase& network, std::span<const BranchId> closed) {
  if (auto check = check_radiality(network, closed); !check.ok()) {
    throw PreconditionError("configuration is not radial: " + check.describe(network));
  }
  const auto n = static_cast<std::size_t>(network.num_nodes());
  std::vector<std::vector<std::pair<NodeId, BranchId>>> adjacency(n);
  for (auto id : closed) {
    const auto& b = network.branch(id);
    adjacency[b.from - 1].emplace_back(b.to, id);
    adjacency[b.to - 1].emplace_back(b.from, id);
  }
  RootedTree tree;
  tree.parent.assign(n, 0);
  tree.parent_branch.assign(n, 0);
  tree.order.reserve(n);
  tree.order.push_back(network.substation);
  std::vector<char> seen(n, 0);
  seen[network.substation - 1] = 1;
  for (std::size_t head = 0; head < tree.order.size(); ++head) {
    const NodeId u = tree.order[head];
    for (auto [v, id] : adjacency[u - 1]) {
      if (seen[v - 1]) continue;
      seen[v - 1] = 1;
      tree.parent[v - 1] = u;
      tree.parent_branch[v - 1] = id;
      tree.order.push_back(v);
    }
  }
  return tree;
}

std::vector<FundamentalLoop> fundamental_loops(const NetworkCase& network) {
  const auto base = network.non_tie_branches();
  if (!is_spanning_tree(network, base)) {
    throw PreconditionError("fundamental loops need the non-tie branches to form a spanning tree");
  }
  const auto tree = root_tree(network, base);
  std::vector<int> depth(static_cast<std::size_t>(network.num_nodes()), 0);
  for (auto node : tree.order) {
    if (node != network.substation) depth[node - 1] = depth[tree.parent[node - 1] - 1] + 1;
  }

  std::vector<FundamentalLoop> loops;
  for (auto tie : network.tie_branches()) {
    FundamentalLoop loop;
    loop.tie = tie;
    loop.branches.push_back(tie);
    NodeId a = network.branch(tie).from;
    NodeId b = network.branch(tie).to;
    while (a != b) {
      if (depth[a - 1] < depth[b - 1]) std::swap(a, b);
      loop.branches.push_back(tree.parent_branch[a - 1]);
      a = tree.parent[a - 1];
    }
    std::sort(loop.branches.begin(), loop.branches.end());
    loops.push_back(std::move(loop));
  }
  return loops;
}

BigInt count_spanning_trees(const NetworkCase& network) {
  const auto lap = laplacian<BigInt>(network);
  const Eigen::Index n = lap.rows();
  if (n <= 1) return BigInt(1);
  const Eigen::Index drop = network.substation - 1;
  Eigen::Matrix<BigInt, Eigen::Dynamic, Eigen::Dynamic> minor(n - 1, n - 1);
  for (Eigen::Index i = 0, mi = 0; i < n; ++i) {
    if (i == drop) continue;
    for (Eigen::Index j = 0, mj = 0; j < n; ++j) {
      if (j == drop) continue;
      minor(mi, mj++) = lap(i, j);
    }
    ++mi;
  }
  return bareiss_determinant<BigInt>(std::move(minor));
}

}  // namespace dnr
