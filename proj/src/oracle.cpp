#include "dnr/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "dnr/disjoint_set.hpp"

namespace dnr {

BigInt search_space_size(int total, int chosen) {
  if (total < 0 || chosen < 0 || chosen > total) throw std::invalid_argument("search_space_size needs 0 <= chosen <= total");
  const int k = std::min(chosen, total - chosen);
  BigInt result = 1;
  for (int i = 1; i <= k; ++i) {
    result *= total - k + i;
    result /= i;
  }
  return result;
}

namespace {

struct LoopProduct {
  const NetworkCase* network;
  std::vector<FundamentalLoop> loops;
  std::vector<std::vector<char>> member;  // member[loop][branch id]

  explicit LoopProduct(const NetworkCase& net) : network(&net), loops(fundamental_loops(net)) {
    for (const auto& loop : loops) {
      std::vector<char> m(static_cast<std::size_t>(net.num_branches()) + 1, 0);
      for (auto id : loop.branches) m[id] = 1;
      member.push_back(std::move(m));
    }
  }

  std::size_t first_choices() const { return loops.empty() ? 1 : loops.front().branches.size(); }

  // Lexicographically first assignment of the open set to loops, one branch per loop.
  bool first_assignment(const std::vector<BranchId>& sorted_open, std::vector<BranchId>& assignment,
                        std::vector<char>& used, std::size_t loop) const {
    if (loop == loops.size()) return true;
    for (std::size_t k = 0; k < sorted_open.size(); ++k) {
      if (used[k] || !member[loop][sorted_open[k]]) continue;
      used[k] = 1;
      assignment[loop] = sorted_open[k];
      if (first_assignment(sorted_open, assignment, used, loop + 1)) return true;
      used[k] = 0;
    }
    return false;
  }

  bool is_canonical(const std::vector<BranchId>& tuple) const {
    auto sorted_open = tuple;
    std::sort(sorted_open.begin(), sorted_open.end());
    std::vector<BranchId> assignment(tuple.size());
    std::vector<char> used(tuple.size(), 0);
    first_assignment(sorted_open, assignment, used, 0);
    return assignment == tuple;
  }

  bool closed_is_tree(const std::vector<char>& is_open) const {
    DisjointSet dsu(network->num_nodes());
    for (const auto& b : network->branches) {
      if (is_open[b.id]) continue;
      if (!dsu.unite(b.from - 1, b.to - 1)) return false;
    }
    return dsu.components() == 1;
  }

  template <class Visit>
  void walk(std::size_t loop, std::vector<BranchId>& tuple, std::vector<char>& is_open, Visit& visit) const {
    if (loop == loops.size()) {
      if (!is_canonical(tuple) || !closed_is_tree(is_open)) return;
      visit(Configuration::from_open(*network, tuple));
      return;
    }
    for (auto id : loops[loop].branches) {
      if (is_open[id]) continue;
      is_open[id] = 1;
      tuple.push_back(id);
      walk(loop + 1, tuple, is_open, visit);
      tuple.pop_back();
      is_open[id] = 0;
    }
  }

  // Visits the slice of the product whose first loop picks its `first`-th branch.
  template <class Visit>
  void walk_slice(std::size_t first, Visit& visit) const {
    std::vector<BranchId> tuple;
    std::vector<char> is_open(static_cast<std::size_t>(network->num_branches()) + 1, 0);
    if (loops.empty()) {
      walk(0, tuple, is_open, visit);
      return;
    }
    const auto id = loops.front().branches[first];
    is_open[id] = 1;
    tuple.push_back(id);
    walk(1, tuple, is_open, visit);
  }
};

bool non_tie_is_tree(const NetworkCase& network) { return is_spanning_tree(network, network.non_tie_branches()); }

// Quantized loss plus open set: a strict total order, so any reduction order
// picks the same winner.
struct Candidate {
  long long loss_key = 0;
  double loss_kw = 0.0;
  Configuration config;
  bool present = false;

  bool better_than(const Candidate& other) const {
    if (!other.present) return present;
    if (!present) return false;
    if (loss_key != other.loss_key) return loss_key < other.loss_key;
    return config.open() < other.config.open();
  }
};

struct Scorer {
  const NetworkCase* network;
  const SweepOptions* sweep;
  std::uint64_t count = 0;
  Candidate best;

  void operator()(const Configuration& config) {
    ++count;
    const auto pf = solve(*network, config, *sweep);
    if (!pf.converged) return;
    Candidate c{std::llround(pf.p_loss_kw * 1e6), pf.p_loss_kw, config, true};
    if (c.better_than(best)) best = std::move(c);
  }
};

}  // namespace

void enumerate_by_loops(const NetworkCase& network, const ConfigurationVisitor& visit) {
  const LoopProduct product(network);
  for (std::size_t first = 0; first < product.first_choices(); ++first) product.walk_slice(first, visit);
}

void enumerate_by_combinations(const NetworkCase& network, const ConfigurationVisitor& visit) {
  const int total = network.num_branches();
  const int chosen = network.tree_size();
  if (chosen < 0 || chosen > total) return;
  std::vector<BranchId> pick(static_cast<std::size_t>(chosen));
  std::iota(pick.begin(), pick.end(), 1);
  while (true) {
    if (is_spanning_tree(network, pick)) visit(Configuration::from_closed(network, pick));
    int i = chosen - 1;
    while (i >= 0 && pick[i] == total - chosen + i + 1) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < chosen; ++j) pick[j] = pick[j - 1] + 1;
  }
}

void enumerate_valid(const NetworkCase& network, const ConfigurationVisitor& visit) {
  if (non_tie_is_tree(network)) {
    enumerate_by_loops(network, visit);
  } else {
    enumerate_by_combinations(network, visit);
  }
}

EnumerationReport exhaustive_optimum(const NetworkCase& network, const OracleOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  EnumerationReport report;
  report.total_combinations = search_space_size(network.num_branches(), network.tree_size());

  std::vector<Scorer> scorers;
  if (non_tie_is_tree(network)) {
    const LoopProduct product(network);
    const auto slices = product.first_choices();
    unsigned workers = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, slices));
    scorers.assign(workers, Scorer{&network, &options.sweep, 0, {}});
    std::atomic<std::size_t> next_slice{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (auto s = next_slice++; s < slices; s = next_slice++) product.walk_slice(s, scorers[w]);
      });
    }
    for (auto& t : pool) t.join();
  } else {
    scorers.assign(1, Scorer{&network, &options.sweep, 0, {}});
    enumerate_by_combinations(network, std::ref(scorers.front()));
  }

  Candidate best;
  for (auto& s : scorers) {
    report.valid_count += s.count;
    if (s.best.better_than(best)) best = s.best;
  }
  if (!best.present) throw std::runtime_error("no radial configuration converged");
  report.best = best.config;
  report.best_loss_kw = best.loss_kw;
  report.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace dnr
