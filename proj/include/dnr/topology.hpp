#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/eigen.hpp>

#include "dnr/network.hpp"

namespace dnr {

using Rng = std::mt19937_64;
using BigInt = boost::multiprecision::cpp_int;

/// A switch state: exactly V - 1 closed branches and the complementary open
/// set. Both lists are kept sorted. Whether the closed set is a tree is a
/// separate question (see is_spanning_tree).
class Configuration {
 public:
  Configuration() = default;

  static Configuration from_closed(const NetworkCase& network, std::vector<BranchId> closed);
  static Configuration from_open(const NetworkCase& network, std::vector<BranchId> open);
  /// All tie branches open, everything else closed.
  static Configuration base(const NetworkCase& network);

  const std::vector<BranchId>& closed() const { return closed_; }
  const std::vector<BranchId>& open() const { return open_; }

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  std::vector<BranchId> closed_;
  std::vector<BranchId> open_;
};

/// Outcome of the radiality test with enough detail to explain a rejection.
struct RadialityCheck {
  enum class Status { radial, wrong_size, loop, island };
  Status status = Status::radial;
  BranchId loop_branch = 0;  ///< first branch that closed a loop
  NodeId island_node = 0;    ///< a node not connected to the substation

  bool ok() const { return status == Status::radial; }
  std::string describe(const NetworkCase& network) const;
};

/// Union-find test over the closed set: rejects on the first loop, then
/// requires a single component. Throws PreconditionError on unknown ids.
RadialityCheck check_radiality(const NetworkCase& network, std::span<const BranchId> closed);

/// True iff `closed` has V - 1 branches connecting every node (radial and
/// every load reachable from the source).
bool is_spanning_tree(const NetworkCase& network, std::span<const BranchId> closed);

/// Randomized Kruskal: a shuffled pass over all branches through union-find.
/// Returns the accepted branches in acceptance order. Every spanning tree has
/// nonzero probability; the distribution is not uniform.
std::vector<BranchId> random_spanning_tree_branches(const NetworkCase& network, Rng& rng);
Configuration random_spanning_tree(const NetworkCase& network, Rng& rng);

/// A radial configuration oriented away from the substation.
struct RootedTree {
  std::vector<NodeId> order;             ///< breadth-first from the substation
  std::vector<NodeId> parent;            ///< indexed by id - 1; 0 for the root
  std::vector<BranchId> parent_branch;   ///< indexed by id - 1; 0 for the root
};

/// Throws PreconditionError unless `closed` is a spanning tree.
RootedTree root_tree(const NetworkCase& network, std::span<const BranchId> closed);

struct FundamentalLoop {
  BranchId tie = 0;
  std::vector<BranchId> branches;  ///< sorted, includes the tie itself
};

/// One loop per tie branch: the tie plus the non-tie path between its ends.
/// Requires the non-tie branches to form a spanning tree.
std::vector<FundamentalLoop> fundamental_loops(const NetworkCase& network);

/// Graph Laplacian over all branches; parallel branches add multiplicity.
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> laplacian(const NetworkCase& network) {
  const auto n = network.num_nodes();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> lap(n, n);
  lap.setConstant(Scalar(0));
  for (const auto& b : network.branches) {
    const auto i = b.from - 1;
    const auto j = b.to - 1;
    lap(i, i) += Scalar(1);
    lap(j, j) += Scalar(1);
    lap(i, j) -= Scalar(1);
    lap(j, i) -= Scalar(1);
  }
  return lap;
}

/// Fraction-free (Bareiss) determinant; exact for integer scalars.
template <class Scalar>
Scalar bareiss_determinant(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m) {
  const auto n = m.rows();
  if (n == 0) return Scalar(1);
  Scalar sign(1);
  Scalar previous(1);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    if (m(k, k) == Scalar(0)) {
      Eigen::Index pivot = k + 1;
      while (pivot < n && m(pivot, k) == Scalar(0)) ++pivot;
      if (pivot == n) return Scalar(0);
      m.row(k).swap(m.row(pivot));
      sign = -sign;
    }
    for (Eigen::Index i = k + 1; i < n; ++i) {
      for (Eigen::Index j = k + 1; j < n; ++j) {
        m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / previous;
      }
      m(i, k) = Scalar(0);
    }
    previous = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

/// Matrix-tree theorem: determinant of the Laplacian with the substation's
/// row and column removed, in exact integer arithmetic.
BigInt count_spanning_trees(const NetworkCase& network);

}  // namespace dnr
