#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <set>

#include "ustlab/crt.hpp"
#include "ustlab/stats.hpp"
#include "ustlab/wilson.hpp"

using namespace ustlab;
using Edges = std::vector<std::pair<VertexId, VertexId>>;

namespace {

// Matrix-tree theorem on the simple graph underlying g.
double kirchhoff_count(const GraphFamily& g) {
  const auto n = static_cast<Eigen::Index>(g.vertex_count());
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    std::set<VertexId> nb;
    for (VertexId u : g.neighbors(v))
      if (u != v) nb.insert(u);
    for (VertexId u : nb) L(Eigen::Index(v), Eigen::Index(u)) = -1.0;
    L(Eigen::Index(v), Eigen::Index(v)) = static_cast<double>(nb.size());
  }
  return L.bottomRightCorner(n - 1, n - 1).determinant();
}

std::vector<int> bfs_distances(const Edges& edges, std::size_t n, VertexId from) {
  std::vector<std::vector<VertexId>> adj(n);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<int> d(n, -1);
  std::queue<VertexId> q;
  d[from] = 0;
  q.push(from);
  while (!q.empty()) {
    const VertexId v = q.front();
    q.pop();
    for (VertexId u : adj[v])
      if (d[u] < 0) {
        d[u] = d[v] + 1;
        q.push(u);
      }
  }
  return d;
}

// Distance between labels 0 and 1 in the tree with the given Pruefer code.
int pruefer_distance(const std::vector<int>& code, int m) {
  std::vector<int> deg(m, 1);
  for (int c : code) ++deg[c];
  Edges edges;
  for (int c : code) {
    int leaf = 0;
    while (deg[leaf] != 1) ++leaf;
    edges.emplace_back(leaf, c);
    --deg[leaf];
    --deg[c];
  }
  int u = -1, w = -1;
  for (int v = 0; v < m; ++v)
    if (deg[v] == 1) (u < 0 ? u : w) = v;
  edges.emplace_back(u, w);
  return bfs_distances(edges, m, 0)[1];
}

}  // namespace

TEST(Wilson, ProducesSpanningTrees) {
  RandomStream rng(31);
  for (const GraphFamily& g : {GraphFamily::torus(2, 5), GraphFamily::hypercube(5), GraphFamily::complete(12)}) {
    const PartialTree t = wilson_ust(g, 3, rng);
    ASSERT_EQ(t.vertex_count(), g.vertex_count());
    const Edges e = t.edges();
    ASSERT_EQ(e.size(), g.vertex_count() - 1);
    for (auto [a, b] : e) {
      const auto nb = g.neighbors(a);
      EXPECT_NE(std::find(nb.begin(), nb.end(), b), nb.end());
    }
    const auto d = bfs_distances(e, g.vertex_count(), t.root());
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
      ASSERT_GE(d[v], 0);
      EXPECT_EQ(t.depth(v), static_cast<std::uint64_t>(d[v]));
    }
    for (int k = 0; k < 30; ++k) {
      const VertexId u = rng.uniform_index(g.vertex_count()), v = rng.uniform_index(g.vertex_count());
      EXPECT_EQ(t.distance(u, v), static_cast<std::uint64_t>(bfs_distances(e, g.vertex_count(), u)[v]));
    }
  }
}

TEST(Wilson, UniformOverSpanningTrees) {
  for (const GraphFamily& g : {GraphFamily::complete(4), GraphFamily::hypercube(3)}) {
    RandomStream rng(32);
    const int n = 200000;
    std::map<Edges, int> counts;
    for (int i = 0; i < n; ++i) ++counts[wilson_ust(g, 0, rng).edges()];
    const double trees = kirchhoff_count(g);
    EXPECT_EQ(static_cast<double>(counts.size()), std::round(trees)) << g.to_string();
    double tv = 0;
    for (const auto& [e, c] : counts) tv += std::abs(c / double(n) - 1.0 / trees);
    EXPECT_LT(0.5 * tv, 0.03) << g.to_string();
  }
  EXPECT_NEAR(kirchhoff_count(GraphFamily::complete(4)), 16.0, 1e-9);
  EXPECT_NEAR(kirchhoff_count(GraphFamily::hypercube(3)), 384.0, 1e-9);
}

TEST(Wilson, OrderAndRootDoNotChangeTheLaw) {
  const GraphFamily g = GraphFamily::hypercube(3);
  RandomStream rng(33);
  std::vector<VertexId> forward(8), backward(8);
  std::iota(forward.begin(), forward.end(), VertexId{0});
  std::reverse_copy(forward.begin(), forward.end(), backward.begin());
  std::vector<Edges> a, b;
  for (int i = 0; i < 100000; ++i) {
    a.push_back(wilson_ust(g, 0, forward, rng).edges());
    b.push_back(wilson_ust(g, 7, backward, rng).edges());
  }
  // 384 trees; two-sample noise alone gives TV near 0.035.
  EXPECT_LT(empirical_tv(a, b), 0.06);
  std::vector<int> da, db;
  for (int i = 0; i < 60000; ++i) {
    da.push_back(static_cast<int>(wilson_ust(g, 0, forward, rng).distance(1, 5)));
    db.push_back(static_cast<int>(wilson_ust(g, 6, backward, rng).distance(1, 5)));
  }
  EXPECT_LT(empirical_tv(da, db), 0.015);
}

TEST(Wilson, RejectsBadInput) {
  RandomStream rng(34);
  EXPECT_THROW(wilson_ust(GraphFamily::ring(10), 10, rng), GraphError);
  EXPECT_THROW(wilson_ust(GraphFamily::ring(10), 0, std::vector<VertexId>{1, 2}, rng), GraphError);
  EXPECT_THROW(wilson_ust(GraphFamily::torus(2, 64), 0, std::vector<VertexId>{}, rng, 1000), GraphError);
}

TEST(CompleteLaw, MatchesPrueferEnumeration) {
  for (int m : {4, 5, 6}) {
    std::vector<double> freq(m, 0.0);
    std::vector<int> code(m - 2, 0);
    const double total = std::pow(double(m), m - 2);
    for (;;) {
      freq[pruefer_distance(code, m)] += 1.0 / total;
      int k = 0;
      while (k < m - 2 && ++code[k] == m) code[k++] = 0;
      if (k == m - 2) break;
    }
    const auto pmf = complete_distance_pmf(m);
    for (int k = 0; k < m; ++k) EXPECT_NEAR(pmf[k], freq[k], 1e-12) << "m=" << m << " k=" << k;
  }
  const auto big = complete_distance_pmf(500);
  EXPECT_NEAR(std::accumulate(big.begin(), big.end(), 0.0), 1.0, 1e-12);
  EXPECT_THROW(complete_distance_pmf(1), GraphError);
}

TEST(PartialTreeLaw, PointsOnlyTreeMatchesCompleteLaw) {
  const GraphFamily g = GraphFamily::complete(30);
  RandomStream rng(35);
  std::vector<std::uint64_t> d;
  for (int i = 0; i < 100000; ++i) {
    const PartialTree t = partial_tree(g, 0, {1, 2}, rng);
    d.push_back(static_cast<std::uint64_t>(t.distances()(0, 1)));
  }
  EXPECT_LT(tv_against_pmf(d, complete_distance_pmf(30)), 0.015);
}

TEST(PartialTreeLaw, ForestStructure) {
  const RootedExtension e = extend_scaled(GraphFamily::torus(2, 12), 0.5);
  RandomStream rng(36);
  std::size_t split = 0;
  for (int rep = 0; rep < 300; ++rep) {
    std::vector<VertexId> pts;
    for (int k = 0; k < 5; ++k) pts.push_back(rng.uniform_index(144));
    const PartialTree t = partial_tree(e, pts, rng);
    EXPECT_TRUE(t.contains(e.root()));
    EXPECT_TRUE(is_tree_metric(t.distances()));
    const SpanningForest f = forest_distances(t);
    ASSERT_EQ(f.points.size(), 5u);
    split += f.component_count > 1;
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 5; ++j) {
        const double d = f.distances(Eigen::Index(i), Eigen::Index(j));
        EXPECT_EQ(std::isinf(d), f.component[i] != f.component[j]);
        if (!std::isinf(d)) EXPECT_EQ(d, t.distances()(Eigen::Index(i), Eigen::Index(j)));
      }
  }
  EXPECT_GT(split, 0u);
  EXPECT_THROW(partial_tree(e, {144}, rng), GraphError);
}
