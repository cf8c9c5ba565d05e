#include "ustlab/crt.hpp"

#include <algorithm>
#include <stdexcept>

namespace ustlab {

std::vector<double> poisson_arrivals(int k, RandomStream& rng) {
  if (k < 2) throw std::invalid_argument("line breaking needs k >= 2");
  std::vector<double> s;
  s.reserve(static_cast<std::size_t>(k - 1));
  double sum = 0.0;
  for (int j = 0; j < k - 1; ++j) {
    sum += rng.exponential();
    s.push_back(std::sqrt(2.0 * sum));
  }
  return s;
}

namespace {

struct Stick {
  double start;  // arc-length coordinate of its base
  double length;
  std::vector<std::pair<double, int>> nodes;  // (position along the stick, node id), sorted
};

}  // namespace

LineBreakTree line_break(int k, RandomStream& rng) {
  LineBreakTree tree;
  tree.arrivals = poisson_arrivals(k, rng);
  const auto K = static_cast<std::size_t>(k);
  // Nodes: ends y_1..y_k are 0..k-1, branch points follow.
  const std::size_t total_nodes = 2 * K - 2;
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(total_nodes), static_cast<Eigen::Index>(total_nodes));
  std::vector<Stick> sticks;
  const double s1 = tree.arrivals[0];
  sticks.push_back(Stick{0.0, s1, {{0.0, 0}, {s1, 1}}});
  D(0, 1) = D(1, 0) = s1;
  tree.lengths.push_back(s1);
  std::vector<int> live{0, 1};
  int next_branch = k;

  for (std::size_t j = 1; j + 1 < K; ++j) {
    const double before = tree.arrivals[j - 1];
    const double len = tree.arrivals[j] - before;
    const double at = rng.uniform() * before;
    tree.attach_at.push_back(at);
    tree.lengths.push_back(len);
    // Sticks are laid out contiguously, so the covering one is found by its start.
    auto it = std::upper_bound(sticks.begin(), sticks.end(), at,
                               [](double x, const Stick& st) { return x < st.start; });
    Stick& st = *std::prev(it);
    const double c = std::min(at - st.start, st.length);
    auto nit = std::upper_bound(st.nodes.begin(), st.nodes.end(), c,
                                [](double x, const std::pair<double, int>& n) { return x < n.first; });
    if (nit == st.nodes.end()) --nit;
    const auto [pb, b] = *nit;
    const auto [pa, a] = *std::prev(nit);
    const int p = next_branch++;
    const int y = static_cast<int>(j) + 1;
    for (int w : live) {
      const double d = std::min(D(a, w) + (c - pa), D(b, w) + (pb - c));
      D(p, w) = D(w, p) = d;
      D(y, w) = D(w, y) = d + len;
    }
    D(p, y) = D(y, p) = len;
    st.nodes.insert(nit, {c, p});
    live.push_back(p);
    live.push_back(y);
    sticks.push_back(Stick{before, len, {{0.0, p}, {len, y}}});
  }
  tree.distances = D.topLeftCorner(k, k);
  return tree;
}

Eigen::MatrixXd sample_Fk(int k, RandomStream& rng) { return line_break(k, rng).distances; }

Eigen::MatrixXd sample_Fk_graph(int k, RandomStream& rng) {
  const std::vector<double> s = poisson_arrivals(k, rng);
  struct Edge {
    int u, v;
    double w;
  };
  // Ends are 0..k-1; every attachment splits an edge with a new branch node.
  std::vector<Edge> edges{{0, 1, s[0]}};
  int nodes = k;
  for (int j = 1; j < k - 1; ++j) {
    const double total = s[static_cast<std::size_t>(j - 1)];
    double at = rng.uniform() * total;
    std::size_t e = 0;
    while (e + 1 < edges.size() && at >= edges[e].w) at -= edges[e++].w;
    at = std::min(at, edges[e].w);
    const int p = nodes++;
    const Edge old = edges[e];
    edges[e] = Edge{old.u, p, at};
    edges.push_back(Edge{p, old.v, old.w - at});
    edges.push_back(Edge{p, j + 1, s[static_cast<std::size_t>(j)] - total});
  }
  std::vector<std::vector<std::pair<int, double>>> adj(static_cast<std::size_t>(nodes));
  for (const Edge& e : edges) {
    adj[static_cast<std::size_t>(e.u)].emplace_back(e.v, e.w);
    adj[static_cast<std::size_t>(e.v)].emplace_back(e.u, e.w);
  }
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(k, k);
  std::vector<double> dist(static_cast<std::size_t>(nodes));
  std::vector<int> stack;
  for (int src = 0; src < k; ++src) {
    std::fill(dist.begin(), dist.end(), -1.0);
    dist[static_cast<std::size_t>(src)] = 0.0;
    stack.assign(1, src);
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      for (auto [y, w] : adj[static_cast<std::size_t>(x)]) {
        if (dist[static_cast<std::size_t>(y)] >= 0.0) continue;
        dist[static_cast<std::size_t>(y)] = dist[static_cast<std::size_t>(x)] + w;
        stack.push_back(y);
      }
    }
    for (int t = 0; t < k; ++t) D(src, t) = dist[static_cast<std::size_t>(t)];
  }
  return D;
}

}  // namespace ustlab
