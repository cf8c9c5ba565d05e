#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <set>

#include "ustlab/capacity.hpp"

using namespace ustlab;

namespace {

// Enumerates every path X_0..X_{steps} from a stationary start with its probability.
void for_each_path(const GraphFamily& g, std::uint64_t steps,
                   const std::function<void(const std::vector<VertexId>&, double)>& visit) {
  std::vector<VertexId> path;
  const double h = g.holding();
  std::function<void(double)> rec = [&](double prob) {
    if (path.size() == steps + 1) {
      visit(path, prob);
      return;
    }
    const VertexId v = path.back();
    if (h > 0) {
      path.push_back(v);
      rec(prob * h);
      path.pop_back();
    }
    const auto nb = g.neighbors(v);
    for (VertexId u : nb) {
      path.push_back(u);
      rec(prob * (1.0 - h) / static_cast<double>(nb.size()));
      path.pop_back();
    }
  };
  const double n = static_cast<double>(g.vertex_count());
  for (VertexId x = 0; x < g.vertex_count(); ++x) {
    path = {x};
    rec(1.0 / n);
  }
}

double brute_cap(const GraphFamily& g, const std::vector<VertexId>& S, std::uint64_t r) {
  const std::set<VertexId> set(S.begin(), S.end());
  double p = 0;
  for_each_path(g, r - 1, [&](const std::vector<VertexId>& path, double w) {
    for (VertexId v : path)
      if (set.count(v)) {
        p += w;
        return;
      }
  });
  return p;
}

double brute_close(const GraphFamily& g, const std::vector<VertexId>& U, const std::vector<VertexId>& V,
                   std::uint64_t r) {
  const std::set<VertexId> su(U.begin(), U.end()), sv(V.begin(), V.end());
  double p = 0;
  for_each_path(g, r - 1, [&](const std::vector<VertexId>& path, double w) {
    bool hu = false, hv = false;
    for (VertexId v : path) {
      hu |= su.count(v) > 0;
      hv |= sv.count(v) > 0;
    }
    if (hu && hv) p += w;
  });
  return p;
}

// E #{(t,u) : X_t = Y_u} from the exact marginal laws of two independent walks.
double brute_hypercube(int n, std::uint64_t q, double holding) {
  const GraphFamily g = GraphFamily::hypercube(n, holding);
  const auto N = static_cast<Eigen::Index>(g.vertex_count());
  const Eigen::MatrixXd P = Eigen::MatrixXd(transition_matrix(g));
  Eigen::RowVectorXd x = Eigen::RowVectorXd::Zero(N), y = Eigen::RowVectorXd::Constant(N, 1.0 / double(N - 1));
  x(0) = 1.0;
  y(0) = 0.0;
  std::vector<Eigen::RowVectorXd> xs{x}, ys{y};
  for (std::uint64_t t = 0; t < q; ++t) {
    xs.push_back(xs.back() * P);
    ys.push_back(ys.back() * P);
  }
  double total = 0;
  for (const auto& a : xs)
    for (const auto& b : ys) total += a.dot(b);
  return total;
}

}  // namespace

TEST(Capacity, HandComputedRing) {
  // Cap_2({0}) on a lazy 4-cycle: 1/4 + (1/2)(1/4).
  EXPECT_NEAR(cap_r_exact(GraphFamily::ring(4), std::vector<VertexId>{0}, 2), 0.375, 1e-15);
  EXPECT_NEAR(cap_r_exact(GraphFamily::ring(9), std::vector<VertexId>{0, 4}, 1), 2.0 / 9.0, 1e-15);
}

TEST(Capacity, ExactMatchesPathEnumeration) {
  const std::vector<std::pair<GraphFamily, std::vector<VertexId>>> cases{
      {GraphFamily::ring(6), {0}},
      {GraphFamily::ring(7, 0.3), {1, 2, 5}},
      {GraphFamily::torus(2, 3), {0, 4}},
      {GraphFamily::hypercube(3, 0.2), {0, 7}},
      {GraphFamily::complete(5, 0.0), {2}},
  };
  for (const auto& [g, S] : cases)
    for (std::uint64_t r = 1; r <= 5; ++r)
      EXPECT_NEAR(cap_r_exact(g, S, r), brute_cap(g, S, r), 1e-12) << g.to_string() << " r=" << r;
}

TEST(Capacity, Properties) {
  const GraphFamily g = GraphFamily::torus(2, 7);
  RandomStream rng(21);
  std::vector<VertexId> all(g.vertex_count());
  for (VertexId v = 0; v < g.vertex_count(); ++v) all[v] = v;
  EXPECT_NEAR(cap_r_exact(g, all, 5), 1.0, 1e-12);
  EXPECT_THROW(cap_r_exact(g, std::vector<VertexId>{}, 5), std::invalid_argument);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<VertexId> U, V;
    for (int k = 0; k < 4; ++k) U.push_back(rng.uniform_index(49));
    for (int k = 0; k < 3; ++k) V.push_back(rng.uniform_index(49));
    std::vector<VertexId> UV = U;
    UV.insert(UV.end(), V.begin(), V.end());
    const std::uint64_t r = 1 + rng.uniform_index(12);
    const double cu = cap_r_exact(g, U, r), cv = cap_r_exact(g, V, r), cuv = cap_r_exact(g, UV, r);
    EXPECT_GE(cuv + 1e-12, std::max(cu, cv));  // monotone in S
    EXPECT_LE(cuv, cu + cv + 1e-12);           // subadditive
    EXPECT_LE(cu, cap_r_exact(g, U, r + 1) + 1e-12);  // monotone in r
    EXPECT_GE(cu, static_cast<double>(std::set<VertexId>(U.begin(), U.end()).size()) / 49.0 - 1e-12);
    const double c = closeness_exact(g, U, V, r);
    EXPECT_GE(c, -1e-12);
    EXPECT_LE(c, std::min(cu, cv) + 1e-12);
  }
}

TEST(Capacity, ClosenessMatchesPathEnumeration) {
  const GraphFamily g = GraphFamily::ring(8, 0.4);
  for (std::uint64_t r = 1; r <= 6; ++r)
    EXPECT_NEAR(closeness_exact(g, std::vector<VertexId>{0}, std::vector<VertexId>{3, 4}, r),
                brute_close(g, {0}, {3, 4}, r), 1e-12);
  // Antipodal points of a long cycle cannot both be visited within r < 32 steps.
  EXPECT_NEAR(closeness_exact(GraphFamily::ring(64), std::vector<VertexId>{0}, std::vector<VertexId>{32}, 20), 0.0,
              1e-15);
}

TEST(Capacity, MonteCarloCoversExact) {
  const GraphFamily g = GraphFamily::torus(3, 5);
  RandomStream rng(22);
  const std::vector<VertexId> U{0, 1, 2, 31}, V{60, 61};
  const auto mc = cap_r(g, U, 10, rng, 200000);
  EXPECT_NEAR(mc.value, cap_r_exact(g, U, 10), 4 * mc.half_width / 1.96);
  EXPECT_EQ(mc.n_samples, 200000u);
  const auto cl = closeness(g, U, V, 10, rng, 200000);
  EXPECT_NEAR(cl.value, closeness_exact(g, U, V, 10), 4 * cl.half_width / 1.96 + 1e-4);
}

TEST(Capacity, ExactRefusesLargeGraphs) {
  EXPECT_THROW(cap_r_exact(GraphFamily::torus(2, 65), std::vector<VertexId>{0}, 3), GraphError);
}

TEST(Constants, RefusesEmptySegment) {
  RandomStream rng(23);
  EXPECT_THROW(estimate_constants(GraphFamily::torus(5, 4), ScaleSet::explicit_scales(30, 10, 20, 30), rng, 10, 0),
               ScaleError);
}

TEST(Constants, ExactAndNestedAgree) {
  const GraphFamily g = GraphFamily::torus(3, 8);
  const ScaleSet sc = ScaleSet::explicit_scales(4, 3, 6, 30);
  RandomStream a(24), b(24), c(25);
  const ConstantsReport ex1 = estimate_constants(g, sc, a, 400, 0, 1);
  const ConstantsReport ex4 = estimate_constants(g, sc, b, 400, 0, 4);
  EXPECT_EQ(ex1.alpha.value, ex4.alpha.value);  // thread-count invariant
  EXPECT_EQ(ex1.gamma.value, ex4.gamma.value);
  ASSERT_EQ(ex1.samples.size(), 400u);
  EXPECT_GT(ex1.gamma.value, 0.0);
  EXPECT_LE(ex1.gamma.value, (30.0 - 9.0) / 30.0);
  EXPECT_GT(ex1.alpha.value, 0.0);
  EXPECT_EQ(ex1.m, static_cast<std::uint64_t>(std::ceil(512.0 / (ex1.alpha.value * 900.0))));
  EXPECT_NEAR(ex1.beta().value, ex1.gamma.value / std::sqrt(ex1.alpha.value), 1e-12);
  for (const auto& s : ex1.samples) {
    EXPECT_LE(s.distinct, s.length);
    EXPECT_LE(s.length, 21u);
  }
  const ConstantsReport nested = estimate_constants(g, sc, c, 400, 2000, 1);
  const double se = std::hypot(ex1.alpha.half_width, nested.alpha.half_width) / 1.96;
  EXPECT_NEAR(nested.alpha.value, ex1.alpha.value, 4 * se);
}

TEST(Hypercube, ExactMatchesMarginalOracle) {
  for (int n : {1, 3, 5})
    for (std::uint64_t q : {0u, 1u, 4u, 9u})
      for (double h : {0.5, 0.2})
        EXPECT_NEAR(hypercube_intersection_exact(n, q, h), brute_hypercube(n, q, h),
                    1e-9 * (1.0 + brute_hypercube(n, q, h)))
            << n << " " << q << " " << h;
  EXPECT_EQ(hypercube_intersection_exact(6, 0), 0.0);
}

TEST(Hypercube, MonteCarloCoversExact) {
  RandomStream rng(26);
  const auto mc = hypercube_intersection(6, 12, rng, 200000);
  EXPECT_NEAR(mc.value, hypercube_intersection_exact(6, 12), 4 * mc.half_width / 1.96);
  RandomStream a(27), b(27);
  EXPECT_EQ(hypercube_intersection(7, 10, a, 5000, 0.5, 1).value, hypercube_intersection(7, 10, b, 5000, 0.5, 3).value);
  EXPECT_EQ(hypercube_horizon(4, 256), 8u);
  EXPECT_EQ(hypercube_horizon(9, 4096), 24u);
}

TEST(Lattice, BasicProperties) {
  RandomStream rng(28);
  EXPECT_THROW(lattice_limit_constants(4, 100, rng, 10), std::invalid_argument);
  const auto zero = lattice_limit_constants(5, 0, rng, 10);
  EXPECT_EQ(zero.gamma.value, 1.0);
  const auto lim = lattice_limit_constants(6, 400, rng, 4000);
  EXPECT_GT(lim.gamma.value, 0.0);
  EXPECT_LT(lim.gamma.value, 1.0);
  EXPECT_LE(lim.alpha.value, lim.gamma.value);
  EXPECT_LE(lim.alpha_half.value, lim.gamma_half.value);
  RandomStream a(29), b(29);
  EXPECT_EQ(lattice_limit_constants(5, 200, a, 500, 1).alpha.value, lattice_limit_constants(5, 200, b, 500, 2).alpha.value);
}
