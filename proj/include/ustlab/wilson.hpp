#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ustlab/extension.hpp"
#include "ustlab/graph.hpp"

namespace ustlab {

/// Tree grown by Wilson's algorithm. Vertices are stored sparsely, so only
/// the visited part of a large graph is materialised.
///
/// Each loop-erased branch remembers the branch it attached to and where, which
/// turns distance queries into a walk over the (short) chain of branches.
class PartialTree {
 public:
  PartialTree(VertexId root, bool root_is_rho);

  VertexId root() const { return root_; }
  bool root_is_rho() const { return root_is_rho_; }
  bool contains(VertexId v) const { return nodes_.count(v) != 0; }
  std::optional<VertexId> parent(VertexId v) const;
  std::size_t vertex_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return nodes_.size() - 1; }

  const std::vector<VertexId>& points() const { return points_; }
  /// Pairwise tree distances among the selected points.
  const Eigen::MatrixXd& distances() const { return dist_; }

  std::uint64_t depth(VertexId v) const;
  std::uint64_t distance(VertexId u, VertexId v) const;
  /// True if the tree path between u and v passes through the root.
  bool path_through_root(VertexId u, VertexId v) const;
  /// Index of the branch hanging directly off the root that contains v (0 for the root itself).
  std::uint32_t top_branch(VertexId v) const;

  /// Sorted (min, max) edge list; two trees on the same vertices are equal iff these are.
  std::vector<std::pair<VertexId, VertexId>> edges() const;

  /// Runs the walk `step` from x until it hits the tree and attaches its
  /// loop-erasure. When `select` is set, x joins the selected points and the
  /// distance matrix grows by one row.
  template <typename Step>
  void add_branch(VertexId x, Step&& step, bool select);

 private:
  struct Node {
    VertexId parent;
    std::uint32_t branch;
    std::uint64_t offset;  // distance from the branch's attachment vertex
  };
  struct Branch {
    std::uint32_t parent;
    std::uint64_t attach_offset;  // offset of the attachment vertex within the parent branch
    std::uint64_t base_depth;     // depth of the attachment vertex
  };
  struct Meet {
    std::uint32_t branch;
    std::uint64_t depth;
  };
  Meet meet(VertexId u, VertexId v) const;
  void select_point(VertexId x);

  VertexId root_;
  bool root_is_rho_;
  std::unordered_map<VertexId, Node> nodes_;
  std::vector<Branch> branches_;
  std::vector<VertexId> points_;
  Eigen::MatrixXd dist_;
  std::unordered_map<VertexId, VertexId> next_;  // scratch for the walk
};

template <typename Step>
void PartialTree::add_branch(VertexId x, Step&& step, bool select) {
  if (!contains(x)) {
    next_.clear();
    VertexId v = x;
    while (!contains(v)) {
      const VertexId w = step(v);
      next_[v] = w;
      v = w;
    }
    // Following the last exits from x yields the loop-erasure.
    const VertexId attach = v;
    std::uint64_t length = 0;
    for (VertexId u = x; u != attach; u = next_[u]) ++length;
    const Node& a = nodes_.at(attach);
    const auto b = static_cast<std::uint32_t>(branches_.size());
    branches_.push_back(Branch{a.branch, a.offset, depth(attach)});
    std::uint64_t offset = length;
    for (VertexId u = x; u != attach; u = next_[u]) nodes_.emplace(u, Node{next_[u], b, offset--});
  }
  if (select) select_point(x);
}

/// Uniform spanning tree of g rooted at `root`, adding vertices in `order`.
/// Throws GraphError above `cap` vertices.
PartialTree wilson_ust(const GraphFamily& g, VertexId root, const std::vector<VertexId>& order, RandomStream& rng,
                       std::uint64_t cap = std::uint64_t{1} << 20);
/// Wilson with an identity vertex order.
PartialTree wilson_ust(const GraphFamily& g, VertexId root, RandomStream& rng);

/// Partial tree T_k on the extension: k successive loop-erased walks from the
/// points to the growing tree, which starts as {rho}.
PartialTree partial_tree(const RootedExtension& e, const std::vector<VertexId>& points, RandomStream& rng);

/// Partial tree of the plain graph, grown from `root` (a base vertex).
PartialTree partial_tree(const GraphFamily& g, VertexId root, const std::vector<VertexId>& points, RandomStream& rng);

struct SpanningForest {
  std::vector<VertexId> points;
  Eigen::MatrixXd distances;       // +infinity across components
  std::vector<std::uint32_t> component;  // label per selected point, 0-based
  std::size_t component_count = 0;       // among the selected points
};

/// Law of d_T(x, y) for x != y in a uniform spanning tree of K_m:
///   P[d = k] = ((k + 1) / m) prod_{i=1}^{k-1} (1 - (i + 1) / m),  k = 1..m-1.
/// Entry k of the result, entry 0 is zero.
std::vector<double> complete_distance_pmf(std::uint64_t m);

/// Restriction of an extension tree to the base graph: deletes rho and reports
/// distances among the selected points, infinite across components.
SpanningForest forest_distances(const PartialTree& t);

}  // namespace ustlab
