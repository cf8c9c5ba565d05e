#include "ustlab/wilson.hpp"

#include <algorithm>
#include <numeric>

namespace ustlab {

PartialTree::PartialTree(VertexId root, bool root_is_rho) : root_(root), root_is_rho_(root_is_rho) {
  nodes_.emplace(root, Node{root, 0, 0});
  branches_.push_back(Branch{0, 0, 0});
}

std::optional<VertexId> PartialTree::parent(VertexId v) const {
  if (v == root_) return std::nullopt;
  return nodes_.at(v).parent;
}

std::uint64_t PartialTree::depth(VertexId v) const {
  const Node& n = nodes_.at(v);
  return branches_[n.branch].base_depth + n.offset;
}

PartialTree::Meet PartialTree::meet(VertexId u, VertexId v) const {
  const Node& nu = nodes_.at(u);
  const Node& nv = nodes_.at(v);
  std::uint32_t bu = nu.branch, bv = nv.branch;
  std::uint64_t ou = nu.offset, ov = nv.offset;
  // Child branches always carry larger ids than their parents.
  while (bu != bv) {
    if (bu > bv) {
      ou = branches_[bu].attach_offset;
      bu = branches_[bu].parent;
    } else {
      ov = branches_[bv].attach_offset;
      bv = branches_[bv].parent;
    }
  }
  return Meet{bu, branches_[bu].base_depth + std::min(ou, ov)};
}

std::uint64_t PartialTree::distance(VertexId u, VertexId v) const {
  return depth(u) + depth(v) - 2 * meet(u, v).depth;
}

bool PartialTree::path_through_root(VertexId u, VertexId v) const { return meet(u, v).branch == 0; }

std::uint32_t PartialTree::top_branch(VertexId v) const {
  std::uint32_t b = nodes_.at(v).branch;
  while (b != 0 && branches_[b].parent != 0) b = branches_[b].parent;
  return b;
}

std::vector<std::pair<VertexId, VertexId>> PartialTree::edges() const {
  std::vector<std::pair<VertexId, VertexId>> out;
  out.reserve(nodes_.size());
  for (const auto& [v, n] : nodes_)
    if (v != root_) out.emplace_back(std::min(v, n.parent), std::max(v, n.parent));
  std::sort(out.begin(), out.end());
  return out;
}

void PartialTree::select_point(VertexId x) {
  const auto k = static_cast<Eigen::Index>(points_.size());
  points_.push_back(x);
  Eigen::MatrixXd grown = Eigen::MatrixXd::Zero(k + 1, k + 1);
  grown.topLeftCorner(k, k) = dist_;
  for (Eigen::Index i = 0; i < k; ++i) {
    const double d = static_cast<double>(distance(points_[static_cast<std::size_t>(i)], x));
    grown(i, k) = d;
    grown(k, i) = d;
  }
  dist_ = std::move(grown);
}

PartialTree wilson_ust(const GraphFamily& g, VertexId root, const std::vector<VertexId>& order, RandomStream& rng,
                       std::uint64_t cap) {
  if (g.vertex_count() > cap) throw GraphError("spanning tree sampling is capped at " + std::to_string(cap) + " vertices");
  if (!g.contains(root)) throw GraphError("root outside the graph");
  PartialTree t(root, false);
  auto step = [&](VertexId v) { return g.step(v, rng); };
  for (VertexId v : order) {
    if (!g.contains(v)) throw GraphError("vertex order leaves the graph");
    t.add_branch(v, step, false);
  }
  if (t.vertex_count() != g.vertex_count()) throw GraphError("vertex order does not cover the graph");
  return t;
}

PartialTree wilson_ust(const GraphFamily& g, VertexId root, RandomStream& rng) {
  std::vector<VertexId> order(g.vertex_count());
  std::iota(order.begin(), order.end(), VertexId{0});
  return wilson_ust(g, root, order, rng);
}

PartialTree partial_tree(const RootedExtension& e, const std::vector<VertexId>& points, RandomStream& rng) {
  PartialTree t(e.root(), true);
  const double p = e.kill_probability();
  const VertexId rho = e.root();
  auto step = [&](VertexId v) { return (p > 0.0 && rng.uniform() < p) ? rho : e.base.step(v, rng); };
  for (VertexId x : points) {
    if (!e.base.contains(x)) throw GraphError("partial tree points must lie in the base graph");
    t.add_branch(x, step, true);
  }
  return t;
}

PartialTree partial_tree(const GraphFamily& g, VertexId root, const std::vector<VertexId>& points, RandomStream& rng) {
  if (!g.contains(root)) throw GraphError("root outside the graph");
  PartialTree t(root, false);
  auto step = [&](VertexId v) { return g.step(v, rng); };
  for (VertexId x : points) {
    if (!g.contains(x)) throw GraphError("partial tree points must lie in the graph");
    t.add_branch(x, step, true);
  }
  return t;
}

SpanningForest forest_distances(const PartialTree& t) {
  SpanningForest f;
  f.points = t.points();
  f.distances = t.distances();
  const std::size_t k = f.points.size();
  std::unordered_map<std::uint32_t, std::uint32_t> label;
  for (std::size_t i = 0; i < k; ++i) {
    const std::uint32_t top = t.root_is_rho() ? t.top_branch(f.points[i]) : 0;
    auto [it, inserted] = label.try_emplace(top, static_cast<std::uint32_t>(label.size()));
    f.component.push_back(it->second);
  }
  f.component_count = label.size();
  if (t.root_is_rho()) {
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i + 1; j < k; ++j)
        if (t.path_through_root(f.points[i], f.points[j])) {
          const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
          f.distances(a, b) = f.distances(b, a) = std::numeric_limits<double>::infinity();
        }
  }
  return f;
}

std::vector<double> complete_distance_pmf(std::uint64_t m) {
  if (m < 2) throw GraphError("complete graph distance law needs m >= 2");
  std::vector<double> pmf(m, 0.0);
  const double M = static_cast<double>(m);
  double survive = 1.0;  // prod_{i<k} (1 - (i+1)/m)
  for (std::uint64_t k = 1; k < m; ++k) {
    pmf[k] = survive * static_cast<double>(k + 1) / M;
    survive *= 1.0 - static_cast<double>(k + 1) / M;
  }
  return pmf;
}

}  // namespace ustlab
