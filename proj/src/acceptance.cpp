#include "ustlab/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>

#include "ustlab/capacity.hpp"
#include "ustlab/crt.hpp"
#include "ustlab/extension.hpp"
#include "ustlab/graph.hpp"
#include "ustlab/lerw.hpp"
#include "ustlab/stats.hpp"
#include "ustlab/wilson.hpp"

namespace ustlab {

namespace {

// Pass thresholds and sample sizes of the acceptance suite.
namespace limits {
constexpr std::uint64_t kTreeSamples = 100000;
constexpr double kTreeFrequencyTolerance = 0.005;
constexpr std::uint64_t kPemantleSamples = 100000;
constexpr double kPemantleTV = 0.02;
constexpr std::uint64_t kCompleteM = 50;
constexpr std::uint64_t kCompleteSamples = 100000;
constexpr double kCompleteTV = 0.02;
constexpr std::uint64_t kRayleighM = 10000;
constexpr std::uint64_t kRayleighSamples = 10000;
constexpr double kRayleighKS = 0.05;
constexpr std::uint64_t kLineBreakSamples = 1000000;
constexpr double kLineBreakKS = 0.01;
constexpr double kLineBreakMean = 1.2533;
constexpr double kLineBreakMeanTolerance = 0.005;
constexpr std::uint64_t kLineBreakIdentitySamples = 100000;
constexpr std::uint64_t kTorusSamples = 5000;
constexpr double kTorusKS = 0.15;
constexpr std::uint64_t kCapacityCases = 20;
constexpr std::uint64_t kCapacityProbes = 100000;
constexpr double kCapacityTolerance = 0.005;
constexpr std::uint64_t kConcentrationReplicates = 1000;
constexpr double kConcentrationViolationFraction = 0.1;
constexpr std::uint64_t kForestSamples = 20000;
constexpr double kForestStandardErrors = 3.0;
constexpr std::uint64_t kHypercubeSamples = 2000000;
constexpr std::uint64_t kLatticeTrunc = 10000;
constexpr std::uint64_t kLatticeSamples = 4000;
constexpr double kLatticeTruncationShift = 0.01;
}  // namespace limits

RandomStream stream_for(const AcceptanceOptions& o, std::uint64_t criterion) {
  return RandomStream(o.seed).split(criterion);
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

std::pair<VertexId, VertexId> distinct_pair(const GraphFamily& g, RandomStream& rng) {
  const VertexId x = rng.uniform_index(g.vertex_count());
  VertexId y = rng.uniform_index(g.vertex_count() - 1);
  if (y >= x) ++y;
  return {x, y};
}

using EdgeList = std::vector<std::pair<VertexId, VertexId>>;

// All spanning trees of a small simple graph, by subset enumeration with union-find.
std::vector<EdgeList> enumerate_spanning_trees(const GraphFamily& g) {
  EdgeList edges;
  for (VertexId v = 0; v < g.vertex_count(); ++v)
    for (VertexId w : g.neighbors(v))
      if (v < w) edges.emplace_back(v, w);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  const std::size_t n = g.vertex_count();
  std::vector<EdgeList> trees;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << edges.size()); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcountll(mask)) != n - 1) continue;
    std::vector<std::size_t> root(n);
    std::iota(root.begin(), root.end(), 0);
    auto find = [&](std::size_t x) {
      while (root[x] != x) x = root[x] = root[root[x]];
      return x;
    };
    bool acyclic = true;
    EdgeList tree;
    for (std::size_t e = 0; e < edges.size() && acyclic; ++e) {
      if (!(mask >> e & 1)) continue;
      const auto a = find(edges[e].first), b = find(edges[e].second);
      if (a == b) acyclic = false;
      root[a] = b;
      tree.push_back(edges[e]);
    }
    if (acyclic) trees.push_back(tree);
  }
  return trees;
}

void run_a1(const AcceptanceOptions& o, CriterionResult& res) {
  RandomStream base = stream_for(o, 1);
  std::ostringstream detail;
  bool ok = true;
  int which = 0;
  for (const GraphFamily& g : {GraphFamily::complete(4), GraphFamily::ring(4)}) {
    const auto oracle = enumerate_spanning_trees(g);
    const auto trees = run_replicates<EdgeList>(limits::kTreeSamples, base.split(which++), o.threads,
                                                [&](std::size_t, RandomStream& s) { return wilson_ust(g, 0, s).edges(); });
    std::map<EdgeList, std::uint64_t> freq;
    for (const auto& t : trees) ++freq[t];
    const double target = 1.0 / static_cast<double>(oracle.size());
    double worst = 0.0;
    for (const auto& t : oracle) {
      auto it = freq.find(t);
      const double f = it == freq.end() ? 0.0 : static_cast<double>(it->second) / limits::kTreeSamples;
      worst = std::max(worst, std::abs(f - target));
    }
    const bool g_ok = freq.size() == oracle.size() && worst <= limits::kTreeFrequencyTolerance;
    ok = ok && g_ok;
    detail << g.to_string() << ": " << oracle.size() << " trees, max |freq-1/" << oracle.size() << "|=" << fmt(worst)
           << "; ";
  }
  res.pass = ok;
  res.detail = detail.str();
}

void run_a2(const AcceptanceOptions& o, CriterionResult& res) {
  RandomStream base = stream_for(o, 2);
  std::ostringstream detail;
  bool ok = true;
  struct Case {
    GraphFamily g;
    VertexId x, y;
  };
  int which = 0;
  for (const Case& c : {Case{GraphFamily::ring(5), 0, 2}, Case{GraphFamily::complete(4), 0, 1}}) {
    const auto tree = run_replicates<double>(limits::kPemantleSamples, base.split(which++), o.threads,
                                             [&](std::size_t, RandomStream& s) {
                                               return static_cast<double>(wilson_ust(c.g, 0, s).distance(c.x, c.y));
                                             });
    const auto lerw = run_replicates<double>(limits::kPemantleSamples, base.split(which++), o.threads,
                                             [&](std::size_t, RandomStream& s) {
                                               const auto p = walk(c.g, c.x, StopRule::hit(c.g, {c.y}), s);
                                               return static_cast<double>(loop_erase(p).length());
                                             });
    const auto rep = two_sample_tv(EmpiricalSample(tree), EmpiricalSample(lerw)).against(limits::kPemantleTV);
    ok = ok && rep.pass;
    detail << c.g.to_string() << " TV=" << fmt(rep.value) << "; ";
  }
  res.pass = ok;
  res.detail = detail.str();
}

std::vector<double> complete_graph_distances(std::uint64_t m, std::uint64_t n, const RandomStream& base,
                                             unsigned threads) {
  const GraphFamily g = GraphFamily::complete(m, 0.0);
  return run_replicates<double>(n, base, threads, [&](std::size_t, RandomStream& s) {
    return static_cast<double>(partial_tree(g, 1, {0}, s).distance(0, 1));
  });
}

void run_a3(const AcceptanceOptions& o, CriterionResult& res) {
  const auto d = complete_graph_distances(limits::kCompleteM, limits::kCompleteSamples, stream_for(o, 3), o.threads);
  std::vector<std::uint64_t> ints(d.begin(), d.end());
  const double tv = tv_against_pmf(ints, complete_distance_pmf(limits::kCompleteM));
  res.pass = tv < limits::kCompleteTV;
  res.detail = "K_50 TV vs closed form=" + fmt(tv);
}

void run_a4(const AcceptanceOptions& o, CriterionResult& res) {
  auto d = complete_graph_distances(limits::kRayleighM, limits::kRayleighSamples, stream_for(o, 4), o.threads);
  const double root = std::sqrt(static_cast<double>(limits::kRayleighM));
  const auto rep = ks_against(normalize_by_scale(EmpiricalSample(d), root), rayleigh_cdf).against(limits::kRayleighKS);
  res.pass = rep.pass;
  res.detail = "K_10000 KS(d/sqrt(m), Rayleigh)=" + fmt(rep.value);
}

// E[s_1] = int_0^inf exp(-x^2/2) dx by composite Simpson on [0, 40].
double rayleigh_mean_by_quadrature() {
  const int n = 20000;
  const double a = 0.0, b = 40.0, h = (b - a) / n;
  double sum = 1.0 + std::exp(-0.5 * b * b);
  for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * std::exp(-0.5 * (a + i * h) * (a + i * h));
  return sum * h / 3.0;
}

void run_a5(const AcceptanceOptions& o, CriterionResult& res) {
  RandomStream base = stream_for(o, 5);
  const auto s1 = run_replicates<double>(limits::kLineBreakSamples, base.split(0), o.threads,
                                         [](std::size_t, RandomStream& s) { return poisson_arrivals(2, s)[0]; });
  const auto ks = ks_against(EmpiricalSample(s1), rayleigh_cdf).against(limits::kLineBreakKS);
  const double mean = std::accumulate(s1.begin(), s1.end(), 0.0) / static_cast<double>(s1.size());
  const double oracle = rayleigh_mean_by_quadrature();
  const bool mean_ok = std::abs(mean - limits::kLineBreakMean) <= limits::kLineBreakMeanTolerance &&
                       std::abs(oracle - limits::kLineBreakMean) <= limits::kLineBreakMeanTolerance;
  const auto gaps = run_replicates<double>(limits::kLineBreakIdentitySamples, base.split(1), o.threads,
                                           [](std::size_t, RandomStream& s) {
                                             const LineBreakTree t = line_break(3, s);
                                             const auto& D = t.distances;
                                             const double lhs = D(0, 1) + D(0, 2) + D(1, 2);
                                             return std::abs(lhs - 2.0 * t.arrivals[1]) / (1.0 + t.arrivals[1]);
                                           });
  const double worst_gap = *std::max_element(gaps.begin(), gaps.end());
  const bool identity_ok = worst_gap < 1e-12;
  res.pass = ks.pass && mean_ok && identity_ok;
  res.detail = "KS(s_1)=" + fmt(ks.value) + ", mean=" + fmt(mean, 6) + " (quadrature " + fmt(oracle, 6) +
               "), k=3 identity max rel gap=" + fmt(worst_gap, 3);
}

double torus_ks(int n, std::uint64_t samples, const RandomStream& base, unsigned threads) {
  const GraphFamily g = GraphFamily::torus(5, static_cast<std::uint64_t>(n));
  const auto d = run_replicates<double>(samples, base, threads, [&](std::size_t, RandomStream& s) {
    const auto [x, y] = distinct_pair(g, s);
    return static_cast<double>(partial_tree(g, y, {x}, s).distance(x, y));
  });
  return ks_against(normalize_by_median(EmpiricalSample(d), rayleigh_median()), rayleigh_cdf).value;
}

void run_a6(const AcceptanceOptions& o, CriterionResult& res) {
  RandomStream base = stream_for(o, 6);
  const double ks4 = torus_ks(4, limits::kTorusSamples, base.split(4), o.threads);
  const double ks6 = torus_ks(6, limits::kTorusSamples, base.split(6), o.threads);
  res.pass = ks6 < ks4 && ks6 < limits::kTorusKS;
  res.detail = "Torus(5,4) KS=" + fmt(ks4) + ", Torus(5,6) KS=" + fmt(ks6);
}

void run_a7(const AcceptanceOptions& o, CriterionResult& res) {
  RandomStream rng = stream_for(o, 7);
  double worst = 0.0;
  bool bound_ok = true;
  const GraphFamily graphs[] = {GraphFamily::ring(8), GraphFamily::torus(2, 4)};
  for (std::uint64_t c = 0; c < limits::kCapacityCases; ++c) {
    const GraphFamily& g = graphs[c % 2];
    const std::uint64_t N = g.vertex_count();
    const std::uint64_t size = 1 + rng.uniform_index(N / 2);
    std::vector<VertexId> all(N);
    std::iota(all.begin(), all.end(), VertexId{0});
    std::shuffle(all.begin(), all.end(), rng);
    const std::vector<VertexId> S(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(size));
    const std::uint64_t r = 1 + rng.uniform_index(12);
    const double exact = cap_r_exact(g, S, r);
    const double mc = cap_r(g, S, r, rng, limits::kCapacityProbes).value;
    worst = std::max(worst, std::abs(exact - mc));
    if (exact > static_cast<double>(r * size) / static_cast<double>(N) + 1e-12) bound_ok = false;
  }
  res.pass = worst < limits::kCapacityTolerance && bound_ok;
  res.detail = "max |exact-MC|=" + fmt(worst) + ", Cap_r <= r|S|/|G| " + (bound_ok ? "holds" : "violated");
}

void run_a8(const AcceptanceOptions& o, CriterionResult& res) {
  const GraphFamily g = GraphFamily::torus(5, 8);
  const std::uint64_t tau = mixing_time(g).tau;
  const ScaleSet sc = ScaleSet::standard(tau, g.vertex_count());
  const auto first = sc.segment_first(1), last = sc.segment_last(1);
  const auto lengths = run_replicates<double>(limits::kConcentrationReplicates, stream_for(o, 8), o.threads,
                                              [&](std::size_t, RandomStream& s) {
                                                const auto p = walk(g, s.uniform_index(g.vertex_count()),
                                                                    StopRule::fixed(sc.r), s);
                                                double len = 0;
                                                for (auto t : locally_retained_times(p.vertices, sc.s))
                                                  if (static_cast<std::int64_t>(t) >= first &&
                                                      static_cast<std::int64_t>(t) <= last)
                                                    ++len;
                                                return len;
                                              });
  const double n = static_cast<double>(lengths.size());
  const double mean = std::accumulate(lengths.begin(), lengths.end(), 0.0) / n;
  double ss = 0;
  for (double x : lengths) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (n - 1));
  const double r = static_cast<double>(sc.r), s = static_cast<double>(sc.s);
  const double window = 2.0 * r * std::pow(s / r, 1.0 / 6.0);
  const double ratio = sd / mean;  // NaN when every segment is empty
  std::uint64_t violations = 0;
  for (double x : lengths)
    if (std::abs(x - mean) > window) ++violations;
  const double frac = static_cast<double>(violations) / n;
  res.pass = ratio < window / r && frac < limits::kConcentrationViolationFraction;
  res.detail = "scales " + sc.to_string() + ", |A_1|=" + std::to_string(sc.segment_length()) + ", mean=" + fmt(mean) +
               ", stdev/mean=" + fmt(ratio) + " (limit " + fmt(window / r) + "), window violations=" + fmt(frac);
}

void run_a9(const AcceptanceOptions& o, CriterionResult& res) {
  const GraphFamily g = GraphFamily::torus(5, 5);
  RandomStream base = stream_for(o, 9);
  const auto tree = run_replicates<double>(limits::kForestSamples, base.split(0), o.threads,
                                           [&](std::size_t, RandomStream& s) {
                                             const auto [x, y] = distinct_pair(g, s);
                                             return static_cast<double>(partial_tree(g, y, {x}, s).distance(x, y));
                                           });
  std::map<double, double> p_tree;
  for (double d : tree) p_tree[d] += 1.0 / static_cast<double>(tree.size());
  std::ostringstream detail;
  double tv[2];
  bool dominated = true;
  const double Ls[] = {1.0, 10.0};
  for (int i = 0; i < 2; ++i) {
    const RootedExtension e = extend_scaled(g, Ls[i]);
    const auto forest = run_replicates<double>(limits::kForestSamples, base.split(1 + i), o.threads,
                                               [&](std::size_t, RandomStream& s) {
                                                 const auto [x, y] = distinct_pair(g, s);
                                                 return forest_distances(partial_tree(e, {x, y}, s)).distances(0, 1);
                                               });
    tv[i] = two_sample_tv(EmpiricalSample(forest), EmpiricalSample(tree)).value;
    std::map<double, double> p_forest;
    for (double d : forest) p_forest[d] += 1.0 / static_cast<double>(forest.size());
    std::map<double, bool> support;
    for (const auto& [d, p] : p_tree) support[d] = true;
    for (const auto& [d, p] : p_forest)
      if (std::isfinite(d)) support[d] = true;
    double worst = -1e9;
    for (const auto& [d, unused] : support) {
      const double pf = p_forest.count(d) ? p_forest[d] : 0.0;
      const double pt = p_tree.count(d) ? p_tree[d] : 0.0;
      const double se = std::sqrt(pf * (1 - pf) / static_cast<double>(forest.size()) +
                                  pt * (1 - pt) / static_cast<double>(tree.size()));
      const double excess = pf - pt - limits::kForestStandardErrors * se;
      worst = std::max(worst, excess);
      if (excess > 0) dominated = false;
    }
    detail << "L=" << Ls[i] << " TV=" << fmt(tv[i]) << " max excess over 3se=" << fmt(worst, 3) << "; ";
  }
  res.pass = tv[1] < tv[0] && dominated;
  res.detail = detail.str();
}

void run_a10(const AcceptanceOptions& o, CriterionResult& res) {
  RandomStream base = stream_for(o, 10);
  std::ostringstream detail;
  bool ok = true;
  std::optional<EstimateWithCI> prev;
  for (int n = 8; n <= 14; n += 2) {
    const GraphFamily g = GraphFamily::hypercube(n);
    const std::uint64_t tau = mixing_time(g).tau;
    const std::uint64_t q = hypercube_horizon(tau, g.vertex_count());
    RandomStream rng = base.split(static_cast<std::uint64_t>(n));
    const auto est = hypercube_intersection(n, q, rng, limits::kHypercubeSamples, 0.5, o.threads);
    if (prev && !(est.value < prev->value && est.hi() < prev->lo())) ok = false;
    detail << "n=" << n << " q=" << q << " E=" << fmt(est.value) << "+-" << fmt(est.half_width, 2)
           << " (exact " << fmt(hypercube_intersection_exact(n, q)) << "); ";
    prev = est;
  }
  res.pass = ok;
  res.detail = detail.str();
}

void run_a11(const AcceptanceOptions& o, CriterionResult& res) {
  RandomStream base = stream_for(o, 11);
  std::ostringstream detail;
  bool ok = true;
  std::optional<EstimateWithCI> prev;
  for (int d : {5, 6, 8}) {
    RandomStream rng = base.split(static_cast<std::uint64_t>(d));
    const LatticeLimits lim = lattice_limit_constants(d, limits::kLatticeTrunc, rng, limits::kLatticeSamples, o.threads);
    const double shift_g = std::abs(lim.gamma.value - lim.gamma_half.value);
    const double shift_a = std::abs(lim.alpha.value - lim.alpha_half.value);
    if (shift_g >= limits::kLatticeTruncationShift || shift_a >= limits::kLatticeTruncationShift) ok = false;
    if (prev && !(lim.gamma.value > prev->value && lim.gamma.lo() > prev->hi())) ok = false;
    detail << "d=" << d << " gamma=" << fmt(lim.gamma.value) << "+-" << fmt(lim.gamma.half_width, 2)
           << " alpha=" << fmt(lim.alpha.value) << " shift(gamma,alpha)=(" << fmt(shift_g, 2) << ","
           << fmt(shift_a, 2) << "); ";
    prev = lim.gamma;
  }
  res.pass = ok;
  res.detail = detail.str();
}

}  // namespace

const std::vector<Criterion>& acceptance_criteria() {
  static const std::vector<Criterion> all = {
      {"A1", "Wilson uniformity on K_4 and Ring(4)", 30, run_a1},
      {"A2", "UST path length equals LERW length", 60, run_a2},
      {"A3", "K_m distance law", 60, run_a3},
      {"A4", "Rayleigh limit on the complete graph", 600, run_a4},
      {"A5", "Poisson line breaking", 60, run_a5},
      {"A6", "Torus trend towards Rayleigh", 1800, run_a6},
      {"A7", "Exact vs Monte Carlo capacity", 60, run_a7},
      {"A8", "Concentration of |LE_s(A_1)| on Torus(5,8)", 1200, run_a8},
      {"A9", "Forest vs tree distances", 1800, run_a9},
      {"A10", "Hypercube intersection count", 600, run_a10},
      {"A11", "Lattice limit constants", 1200, run_a11},
  };
  return all;
}

std::vector<std::string> quick_criteria() { return {"A1", "A2", "A3", "A4", "A5"}; }

std::vector<CriterionResult> run_acceptance(const std::vector<std::string>& ids, const AcceptanceOptions& opts,
                                            std::ostream& out) {
  std::vector<CriterionResult> results;
  for (const Criterion& c : acceptance_criteria()) {
    if (!ids.empty() && std::find(ids.begin(), ids.end(), c.id) == ids.end()) continue;
    CriterionResult r;
    r.id = c.id;
    r.title = c.title;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(opts, r);
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r.seconds > c.time_limit_seconds) {
      r.pass = false;
      r.detail += " exceeded time limit " + fmt(c.time_limit_seconds) + " s;";
    }
    out << std::left << std::setw(4) << r.id << (r.pass ? " PASS " : " FAIL ") << r.title << " | " << r.detail << " ["
        << std::fixed << std::setprecision(1) << r.seconds << " s]" << std::defaultfloat << std::endl;
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace ustlab
