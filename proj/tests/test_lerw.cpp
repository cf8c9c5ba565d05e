#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

#include "ustlab/lerw.hpp"
#include "ustlab/stats.hpp"

using namespace ustlab;
using Path = std::vector<VertexId>;

namespace {

// Direct chronological loop-erasure with linear scans; the reference for the hashed version.
Path naive_erase(const Path& p) {
  Path out;
  for (VertexId v : p) {
    auto it = std::find(out.begin(), out.end(), v);
    if (it != out.end())
      out.erase(it + 1, out.end());
    else
      out.push_back(v);
  }
  return out;
}

std::vector<std::size_t> naive_retained(const Path& p, std::size_t s) {
  std::vector<std::size_t> out;
  const std::size_t T = p.size() - 1;
  for (std::size_t u = 0; u <= T; ++u) {
    const std::size_t lo = u >= s ? u - s : 0;
    const Path prefix = naive_erase(Path(p.begin() + lo, p.begin() + u + 1));
    bool hit = false;
    for (std::size_t t = u + 1; t <= std::min(T, u + s); ++t) hit |= std::count(prefix.begin(), prefix.end(), p[t]) > 0;
    if (!hit) out.push_back(u);
  }
  return out;
}

std::vector<std::size_t> naive_cutpoints(const Path& p, std::size_t tau) {
  std::vector<std::size_t> out;
  const std::size_t T = p.size() - 1;
  for (std::size_t u = 0; u <= T; ++u) {
    std::set<VertexId> past, future;
    for (std::size_t t = u >= tau ? u - tau : 0; t < u; ++t) past.insert(p[t]);
    for (std::size_t t = u + 1; t <= std::min(T, u + tau); ++t) future.insert(p[t]);
    bool meet = false;
    for (VertexId v : past) meet |= future.count(v) > 0;
    if (!meet) out.push_back(u);
  }
  return out;
}

Path random_walk(const GraphFamily& g, std::uint64_t steps, RandomStream& rng) {
  return walk(g, rng.uniform_index(g.vertex_count()), StopRule::fixed(steps), rng).vertices;
}

Path line(std::size_t T) {
  Path p(T + 1);
  for (std::size_t t = 0; t <= T; ++t) p[t] = t;
  return p;
}

}  // namespace

TEST(LoopErase, SmallFixtures) {
  const Path abac{0, 1, 0, 2};
  const auto le = loop_erase(abac);
  EXPECT_EQ(le.vertices, (Path{0, 2}));
  EXPECT_EQ(le.retained_times, (std::vector<std::size_t>{2, 3}));
  const auto le2 = loop_erase(Path{0, 1, 2, 3, 1, 4});
  EXPECT_EQ(le2.vertices, (Path{0, 1, 4}));
  EXPECT_EQ(le2.retained_times, (std::vector<std::size_t>{0, 4, 5}));
  EXPECT_EQ(loop_erase(Path{7}).length(), 0u);
}

TEST(LoopErase, MatchesNaiveAndIsSelfAvoidingAndIdempotent) {
  RandomStream rng(1);
  const GraphFamily g = GraphFamily::torus(2, 5);
  for (int rep = 0; rep < 500; ++rep) {
    const Path p = random_walk(g, 1 + rng.uniform_index(80), rng);
    const auto le = loop_erase(p);
    EXPECT_EQ(le.vertices, naive_erase(p));
    std::set<VertexId> distinct(le.vertices.begin(), le.vertices.end());
    EXPECT_EQ(distinct.size(), le.vertices.size());
    EXPECT_EQ(loop_erase(le.vertices).vertices, le.vertices);
    ASSERT_TRUE(std::is_sorted(le.retained_times.begin(), le.retained_times.end()));
    for (std::size_t k = 0; k < le.size(); ++k) EXPECT_EQ(p[le.retained_times[k]], le.vertices[k]);
    EXPECT_EQ(le.vertices.front(), p.front());
    EXPECT_EQ(le.vertices.back(), p.back());
  }
}

TEST(LocalLoopErase, SmallFixtures) {
  const Path abac{0, 1, 0, 2};
  EXPECT_EQ(locally_retained_times(abac, 1), (std::vector<std::size_t>{0, 2, 3}));
  EXPECT_EQ(locally_retained_times(abac, 2), (std::vector<std::size_t>{2, 3}));
  EXPECT_EQ(local_loop_erase(abac, 2).vertices, (Path{0, 2}));
  EXPECT_THROW(locally_retained_times(abac, 0), std::invalid_argument);
}

TEST(LocalLoopErase, MatchesDefinition) {
  RandomStream rng(2);
  const GraphFamily g = GraphFamily::torus(2, 4);
  for (int rep = 0; rep < 300; ++rep) {
    const Path p = random_walk(g, 1 + rng.uniform_index(60), rng);
    const std::size_t s = 1 + rng.uniform_index(12);
    EXPECT_EQ(locally_retained_times(p, s), naive_retained(p, s));
  }
}

TEST(LocalLoopErase, WideWindowEqualsChronological) {
  RandomStream rng(3);
  const GraphFamily g = GraphFamily::torus(3, 4);
  for (int rep = 0; rep < 1000; ++rep) {
    const Path p = random_walk(g, 1 + rng.uniform_index(40), rng);
    const auto local = local_loop_erase(p, p.size());
    const auto chrono = loop_erase(p);
    EXPECT_EQ(local.retained_times, chrono.retained_times);
    EXPECT_EQ(local.vertices, chrono.vertices);
  }
}

TEST(Cutpoints, MatchDefinition) {
  RandomStream rng(4);
  const GraphFamily g = GraphFamily::torus(2, 6);
  for (int rep = 0; rep < 300; ++rep) {
    const Path p = random_walk(g, rng.uniform_index(70), rng);
    const std::size_t tau = 1 + rng.uniform_index(8);
    EXPECT_EQ(local_cutpoints(p, tau), naive_cutpoints(p, tau));
  }
  EXPECT_EQ(local_cutpoints(line(5), 2).size(), 6u);
}

TEST(LoopGap, MatchesPairScan) {
  RandomStream rng(5);
  const GraphFamily g = GraphFamily::ring(9);
  for (int rep = 0; rep < 300; ++rep) {
    const Path p = random_walk(g, rng.uniform_index(40), rng);
    const std::size_t lo = 1 + rng.uniform_index(6), hi = lo + rng.uniform_index(10);
    bool expect = false;
    for (std::size_t t = 0; t < p.size(); ++t)
      for (std::size_t u = t + 1; u < p.size(); ++u) expect |= p[t] == p[u] && u - t >= lo && u - t <= hi;
    EXPECT_EQ(has_loop_with_gap(p, lo, hi), expect);
  }
}

TEST(Scales, StandardHierarchy) {
  const ScaleSet s = ScaleSet::standard(106, 32768);
  EXPECT_EQ(s.s, 121u);
  EXPECT_EQ(s.q, 138u);
  EXPECT_EQ(s.r, 158u);
  EXPECT_EQ(s.segment_length(), 0u);
  EXPECT_THROW(ScaleSet::standard(30, 1024), ScaleError);
  EXPECT_THROW(ScaleSet::explicit_scales(1, 3, 3, 9), ScaleError);
  EXPECT_THROW(ScaleSet::explicit_scales(0, 1, 2, 9), ScaleError);
  const ScaleSet e = ScaleSet::explicit_scales(1, 1, 2, 5);
  EXPECT_EQ(e.segment_first(1), 3);
  EXPECT_EQ(e.segment_last(1), 4);
  EXPECT_EQ(e.segment_first(2), 8);
  EXPECT_EQ(e.segment_last(2), 9);
}

TEST(Decompose, LabelsOnCraftedPaths) {
  const ScaleSet sc = ScaleSet::explicit_scales(1, 1, 2, 5);  // A_1=[3,4], A_2=[8,9], A_3=[13,14]
  {
    const auto d = decompose(line(15), sc);
    EXPECT_EQ(d.ell, 3u);
    ASSERT_EQ(d.segments.size(), 3u);
    for (auto l : d.labels) EXPECT_EQ(l, IndexClass::Good);
    EXPECT_EQ(d.segment(2)->local_erasure, (Path{8, 9}));
  }
  {
    Path p = line(15);
    p[8] = 3;  // A_2 revisits A_1
    const auto d = decompose(p, sc);
    EXPECT_EQ(d.labels[0], IndexClass::SingleIntersection);
    EXPECT_EQ(d.labels[1], IndexClass::SingleIntersection);
    EXPECT_EQ(d.labels[2], IndexClass::Good);
  }
  {
    Path p = line(15);
    p[8] = 4;
    p[14] = 3;  // A_1 is met from two other blocks
    EXPECT_EQ(decompose(p, sc).labels[0], IndexClass::Bad);
  }
  {
    Path p = line(15);
    p[1] = 8;  // A_2 is met in block 1 but outside A_1
    EXPECT_EQ(decompose(p, sc).labels[1], IndexClass::Bad);
  }
}

TEST(IndexSequences, SurvivorRecursion) {
  auto only_13 = [](std::size_t i, std::size_t j) { return i == 1 && j == 3; };
  EXPECT_EQ(survivor_sequence(3, only_13), (std::vector<std::size_t>{0, 3}));
  EXPECT_EQ(survivor_sequence(4, [](std::size_t, std::size_t) { return false; }),
            (std::vector<std::size_t>{0, 1, 2, 3, 4}));
  Eigen::MatrixXi ind = Eigen::MatrixXi::Zero(5, 5);
  ind(1, 3) = 1;
  EXPECT_EQ(index_sequence_K(ind, 3), (std::vector<std::size_t>{0, 3}));
  ind(2, 4) = 1;
  EXPECT_EQ(index_sequence_K(ind, 4), (std::vector<std::size_t>{0, 3, 4}));
  EXPECT_THROW(index_sequence_K(ind, 5), std::invalid_argument);
}

TEST(IndexSequences, GFromSegments) {
  const ScaleSet sc = ScaleSet::explicit_scales(1, 1, 2, 5);
  EXPECT_EQ(index_sequence_G(line(15), sc), (std::vector<std::size_t>{0, 1, 2, 3}));
  Path p = line(15);
  p[13] = 8;  // LE_s(A_2) meets A_3
  EXPECT_EQ(index_sequence_G(p, sc), (std::vector<std::size_t>{0, 1, 3}));
}

// The indicator-only K sampler against loop-erasing an actual walk on K_m.
TEST(IndexSequences, KSamplerMatchesLoopErasedCompleteWalk) {
  const std::uint64_t m = 5, T = 8;
  const GraphFamily g = GraphFamily::complete(m, 0.0);
  RandomStream rng(6);
  std::vector<std::vector<std::size_t>> sampled, direct;
  for (int i = 0; i < 100000; ++i) {
    sampled.push_back(sample_index_sequence_K(m, T, rng));
    const Path w = walk(g, 0, StopRule::fixed(T - 1), rng).vertices;
    auto times = loop_erase(w).retained_times;
    times.push_back(T);
    direct.push_back(times);
  }
  EXPECT_LT(empirical_tv(sampled, direct), 0.03);
}

TEST(Decomposable, ConditionsOnCraftedPaths) {
  const ScaleSet sc = ScaleSet::explicit_scales(1, 2, 3, 10);
  const std::uint64_t G = 1000;
  const double alpha = 0.5;
  const double target = alpha * 100.0 / G;
  CapacityOracle exact_target = [&](std::span<const VertexId>) { return target; };
  CapacityOracle too_big = [](std::span<const VertexId>) { return 1.0; };

  EXPECT_TRUE(is_locally_decomposable(line(30), sc, alpha, 0.5, G, exact_target).decomposable);
  EXPECT_EQ(is_locally_decomposable(line(30), sc, alpha, 2.0, G, exact_target).violated, 2);
  EXPECT_EQ(is_locally_decomposable(line(30), sc, alpha, 0.5, G, too_big).violated, 3);
  {
    Path p = line(30);
    p[12] = 10;
    EXPECT_EQ(is_locally_decomposable(p, sc, alpha, 0.5, G, exact_target).violated, 4);
  }
  {
    Path p = line(30);
    p[22] = 10;
    EXPECT_EQ(is_locally_decomposable(p, sc, alpha, 0.5, G, exact_target).violated, 5);
  }
  {
    Path p = line(30);
    p[5] = 12;
    EXPECT_EQ(is_locally_decomposable(p, sc, alpha, 0.5, G, exact_target).violated, 1);
  }
}

TEST(Decomposable, MissingCutpointWindow) {
  const ScaleSet sc = ScaleSet::explicit_scales(3, 1, 2, 50);
  Path p = line(60);
  p[10] = p[12] = 1000;
  p[11] = p[13] = 1001;
  const double target = 0.5 * 2500.0 / 5000.0;
  CapacityOracle cap = [&](std::span<const VertexId>) { return target; };
  const auto rep = is_locally_decomposable(p, sc, 0.5, 0.9, 5000, cap);
  EXPECT_EQ(rep.violated, 6) << rep.detail;
}

TEST(IncrementalEraser, AgreesWithBatch) {
  RandomStream rng(7);
  const GraphFamily g = GraphFamily::torus(2, 5);
  IncrementalEraser er(g.vertex_count());
  for (int rep = 0; rep < 200; ++rep) {
    er.reset();
    const Path p = random_walk(g, rng.uniform_index(60), rng);
    for (VertexId v : p) er.push(v);
    EXPECT_EQ(er.path(), loop_erase(p).vertices);
  }
}
