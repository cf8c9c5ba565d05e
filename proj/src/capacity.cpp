#include "ustlab/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

namespace ustlab {

namespace {

// Membership test for a vertex set: flags on modest graphs, hashing otherwise.
class Membership {
 public:
  Membership(const GraphFamily& g, std::span<const VertexId> S) {
    if (g.vertex_count() <= (std::uint64_t{1} << 22)) {
      flags_.assign(g.vertex_count(), 0);
      for (VertexId v : S) flags_[v] = 1;
    } else {
      set_.insert(S.begin(), S.end());
    }
  }
  bool operator()(VertexId v) const { return flags_.empty() ? set_.count(v) != 0 : flags_[v] != 0; }

 private:
  std::vector<std::uint8_t> flags_;
  std::unordered_set<VertexId> set_;
};

void check_probe_args(std::span<const VertexId> S, std::uint64_t r) {
  if (r == 0) throw std::invalid_argument("capacity horizon r must be >= 1");
  if (S.empty()) throw std::invalid_argument("capacity of an empty set");
}

// Walk from a uniform start for r - 1 steps; bit 0 set if U was hit, bit 1 if V was.
template <typename InU, typename InV>
int probe(const GraphFamily& g, std::uint64_t r, RandomStream& rng, const InU& in_u, const InV& in_v) {
  VertexId x = rng.uniform_index(g.vertex_count());
  int hits = (in_u(x) ? 1 : 0) | (in_v(x) ? 2 : 0);
  for (std::uint64_t t = 1; t < r && hits != 3; ++t) {
    x = g.step(x, rng);
    if (in_u(x)) hits |= 1;
    if (in_v(x)) hits |= 2;
  }
  return hits;
}

}  // namespace

EstimateWithCI EstimateWithCI::from_samples(std::span<const double> xs, std::string id) {
  EstimateWithCI e;
  e.estimator_id = std::move(id);
  e.n_samples = xs.size();
  if (xs.empty()) return e;
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = xs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  e.value = mean;
  e.half_width = 1.96 * sd / std::sqrt(n);
  return e;
}

double cap_r_exact(const GraphFamily& g, std::span<const VertexId> S, std::uint64_t r) {
  check_probe_args(S, r);
  const std::uint64_t n = g.vertex_count();
  if (n > kExactCapacityLimit) throw GraphError("exact capacity needs |G| <= " + std::to_string(kExactCapacityLimit));
  Eigen::VectorXd avoid = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
  for (VertexId v : S) avoid(static_cast<Eigen::Index>(v)) = 0.0;
  const auto P = transition_matrix(g);
  // u_t(x) = P_pi[X_0..X_t avoid S, X_t = x]
  Eigen::RowVectorXd u = avoid.transpose() / static_cast<double>(n);
  for (std::uint64_t t = 1; t < r; ++t) u = (u * P).cwiseProduct(avoid.transpose());
  return std::clamp(1.0 - u.sum(), 0.0, 1.0);
}

double closeness_exact(const GraphFamily& g, std::span<const VertexId> U, std::span<const VertexId> V,
                       std::uint64_t r) {
  std::vector<VertexId> both(U.begin(), U.end());
  both.insert(both.end(), V.begin(), V.end());
  std::sort(both.begin(), both.end());
  both.erase(std::unique(both.begin(), both.end()), both.end());
  const double cl = cap_r_exact(g, U, r) + cap_r_exact(g, V, r) - cap_r_exact(g, both, r);
  return std::max(cl, 0.0);
}

EstimateWithCI cap_r(const GraphFamily& g, std::span<const VertexId> S, std::uint64_t r, RandomStream& rng,
                     std::uint64_t n_samples) {
  check_probe_args(S, r);
  const Membership in(g, S);
  auto never = [](VertexId) { return false; };
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < n_samples; ++i) hits += probe(g, r, rng, in, never) & 1;
  const double n = static_cast<double>(n_samples);
  const double p = n_samples ? static_cast<double>(hits) / n : 0.0;
  return EstimateWithCI{p, n_samples > 1 ? 1.96 * std::sqrt(p * (1 - p) / (n - 1)) : 0.0, n_samples, "cap_r/probe"};
}

EstimateWithCI closeness(const GraphFamily& g, std::span<const VertexId> U, std::span<const VertexId> V,
                         std::uint64_t r, RandomStream& rng, std::uint64_t n_samples) {
  check_probe_args(U, r);
  check_probe_args(V, r);
  const Membership in_u(g, U), in_v(g, V);
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < n_samples; ++i) hits += probe(g, r, rng, in_u, in_v) == 3;
  const double n = static_cast<double>(n_samples);
  const double p = n_samples ? static_cast<double>(hits) / n : 0.0;
  return EstimateWithCI{p, n_samples > 1 ? 1.96 * std::sqrt(p * (1 - p) / (n - 1)) : 0.0, n_samples,
                        "closeness/probe"};
}

EstimateWithCI ConstantsReport::beta() const {
  EstimateWithCI b;
  b.estimator_id = "beta=gamma/sqrt(alpha)";
  b.n_samples = gamma.n_samples;
  if (!(alpha.value > 0.0)) return b;
  b.value = gamma.value / std::sqrt(alpha.value);
  const double rg = gamma.value > 0.0 ? gamma.half_width / gamma.value : 0.0;
  const double ra = alpha.half_width / (2.0 * alpha.value);
  b.half_width = b.value * std::sqrt(rg * rg + ra * ra);
  return b;
}

ConstantsReport estimate_constants(const GraphFamily& g, const ScaleSet& scales, RandomStream& rng,
                                   std::uint64_t n_outer, std::uint64_t n_inner, unsigned threads) {
  if (scales.s == 0 || scales.r <= 3 * scales.s)
    throw ScaleError("segment A_1 is empty for " + scales.to_string() + " (needs r > 3s)");
  const bool exact = n_inner == 0;
  if (exact && g.vertex_count() > kExactCapacityLimit)
    throw GraphError("exact inner capacities need |G| <= " + std::to_string(kExactCapacityLimit) +
                     "; pass an inner probe count");
  const std::uint64_t r = scales.r;
  const std::size_t first = static_cast<std::size_t>(scales.segment_first(1));
  const std::size_t last = static_cast<std::size_t>(scales.segment_last(1));

  const RandomStream base = rng.split(rng());
  auto samples = run_replicates<SegmentSample>(n_outer, base, threads, [&](std::size_t, RandomStream& s) {
    const WalkPath path = walk(g, s.uniform_index(g.vertex_count()), StopRule::fixed(r), s);
    const auto retained = locally_retained_times(path.vertices, scales.s);
    std::vector<VertexId> erased;
    for (std::size_t t : retained)
      if (t >= first && t <= last) erased.push_back(path.vertices[t]);
    SegmentSample out;
    out.length = erased.size();
    std::sort(erased.begin(), erased.end());
    erased.erase(std::unique(erased.begin(), erased.end()), erased.end());
    out.distinct = erased.size();
    if (erased.empty()) return out;
    if (exact) {
      out.capacity = cap_r_exact(g, erased, r);
    } else {
      const EstimateWithCI c = cap_r(g, erased, r, s, n_inner);
      out.capacity = c.value;
      out.capacity_half_width = c.half_width;
    }
    return out;
  });

  ConstantsReport rep;
  rep.scales = scales;
  rep.vertex_count = g.vertex_count();
  const double G = static_cast<double>(g.vertex_count());
  const double rr = static_cast<double>(r);
  std::vector<double> lengths, caps;
  for (const auto& x : samples) {
    lengths.push_back(static_cast<double>(x.length) / rr);
    caps.push_back(x.capacity * G / (rr * rr));
  }
  rep.gamma = EstimateWithCI::from_samples(lengths, "gamma/E|LE_s(A_1)|/r");
  rep.alpha = EstimateWithCI::from_samples(caps, exact ? "alpha/exact-inner" : "alpha/nested-probe");
  rep.m = rep.alpha.value > 0.0 ? static_cast<std::uint64_t>(std::ceil(G / (rep.alpha.value * rr * rr))) : 0;
  rep.samples = std::move(samples);
  return rep;
}

namespace {

using LatticeKey = unsigned __int128;

struct LatticeKeyHash {
  std::size_t operator()(LatticeKey k) const {
    return static_cast<std::size_t>(splitmix64(static_cast<std::uint64_t>(k) ^ splitmix64(static_cast<std::uint64_t>(k >> 64))));
  }
};

using KeySet = std::unordered_set<LatticeKey, LatticeKeyHash>;

// Positions packed in base 2*trunc+1 after shifting by trunc.
class LatticeWalker {
 public:
  LatticeWalker(int d, std::uint64_t trunc) : x_(static_cast<std::size_t>(d), 0), offset_(trunc) {
    base_ = 2 * static_cast<LatticeKey>(trunc) + 1;
  }
  void walk(std::uint64_t steps, RandomStream& rng, std::vector<LatticeKey>& out) {
    std::fill(x_.begin(), x_.end(), 0);
    out.clear();
    out.push_back(key());
    const std::uint64_t d = x_.size();
    for (std::uint64_t t = 0; t < steps; ++t) {
      const std::uint64_t c = rng.uniform_index(2 * d);
      x_[c >> 1] += (c & 1) ? 1 : -1;
      out.push_back(key());
    }
  }

 private:
  LatticeKey key() const {
    LatticeKey k = 0;
    for (auto it = x_.rbegin(); it != x_.rend(); ++it) k = k * base_ + static_cast<LatticeKey>(*it + static_cast<std::int64_t>(offset_));
    return k;
  }
  std::vector<std::int64_t> x_;
  std::uint64_t offset_;
  LatticeKey base_;
};

// Vertex set of the chronological loop-erasure of path[from..to].
void erased_set(const std::vector<LatticeKey>& path, std::size_t from, std::size_t to, KeySet& out,
                std::unordered_map<LatticeKey, std::size_t, LatticeKeyHash>& pos, std::vector<LatticeKey>& stack) {
  pos.clear();
  stack.clear();
  for (std::size_t t = from; t <= to; ++t) {
    auto [it, inserted] = pos.try_emplace(path[t], stack.size());
    if (!inserted) {
      for (std::size_t k = it->second + 1; k < stack.size(); ++k) pos.erase(stack[k]);
      stack.resize(it->second + 1);
    } else {
      stack.push_back(path[t]);
    }
  }
  out.clear();
  out.insert(stack.begin(), stack.end());
}

bool misses(const KeySet& set, const std::vector<LatticeKey>& path, std::size_t from, std::size_t to) {
  for (std::size_t t = from; t <= to; ++t)
    if (set.count(path[t])) return false;
  return true;
}

struct LatticeOutcome {
  double gamma = 0, alpha = 0, gamma_half = 0, alpha_half = 0;
};

}  // namespace

LatticeLimits lattice_limit_constants(int d, std::uint64_t trunc, RandomStream& rng, std::uint64_t n_samples,
                                      unsigned threads) {
  if (d < 5) throw std::invalid_argument("lattice limits need d >= 5");
  {
    const long double bits = static_cast<long double>(d) * std::log2(2.0L * static_cast<long double>(trunc) + 1.0L);
    if (bits >= 127.0L) throw std::invalid_argument("lattice truncation too large for packed coordinates");
  }
  LatticeLimits out;
  out.dimension = d;
  out.trunc = trunc;
  const std::uint64_t half = trunc / 2;
  const RandomStream base = rng.split(rng());
  auto results = run_replicates<LatticeOutcome>(n_samples, base, threads, [&](std::size_t, RandomStream& s) {
    LatticeOutcome o;
    if (trunc == 0) {
      o.gamma = o.alpha = o.gamma_half = o.alpha_half = 1.0;
      return o;
    }
    thread_local std::vector<LatticeKey> Y, Z, W, stack;
    thread_local KeySet le_y, le_z;
    thread_local std::unordered_map<LatticeKey, std::size_t, LatticeKeyHash> pos;
    LatticeWalker walker(d, trunc);
    walker.walk(trunc, s, Y);
    walker.walk(trunc, s, Z);
    walker.walk(trunc, s, W);
    auto evaluate = [&](std::uint64_t n, double& g, double& a) {
      erased_set(Y, 0, n, le_y, pos, stack);
      if (n == 0 || !misses(le_y, Z, 1, n)) return;
      g = 1.0;
      if (!misses(le_y, W, 1, n)) return;
      erased_set(Z, 1, n, le_z, pos, stack);
      if (misses(le_z, W, 1, n)) a = 1.0;
    };
    evaluate(trunc, o.gamma, o.alpha);
    if (half == 0) {
      o.gamma_half = o.alpha_half = 1.0;
    } else {
      evaluate(half, o.gamma_half, o.alpha_half);
    }
    return o;
  });
  std::vector<double> g, a, gh, ah;
  for (const auto& r : results) {
    g.push_back(r.gamma);
    a.push_back(r.alpha);
    gh.push_back(r.gamma_half);
    ah.push_back(r.alpha_half);
  }
  out.gamma = EstimateWithCI::from_samples(g, "gamma_inf/trunc=" + std::to_string(trunc));
  out.alpha = EstimateWithCI::from_samples(a, "alpha_inf/trunc=" + std::to_string(trunc));
  out.gamma_half = EstimateWithCI::from_samples(gh, "gamma_inf/trunc=" + std::to_string(half));
  out.alpha_half = EstimateWithCI::from_samples(ah, "alpha_inf/trunc=" + std::to_string(half));
  return out;
}

EstimateWithCI hypercube_intersection(int n, std::uint64_t q, RandomStream& rng, std::uint64_t n_samples,
                                      double holding, unsigned threads) {
  const GraphFamily g = GraphFamily::hypercube(n, holding);
  const std::uint64_t N = g.vertex_count();
  const RandomStream base = rng.split(rng());
  auto counts = run_replicates<double>(n_samples, base, threads, [&](std::size_t, RandomStream& s) {
    const VertexId x0 = s.uniform_index(N);
    VertexId y0 = s.uniform_index(N - 1);
    if (y0 >= x0) ++y0;
    std::unordered_map<VertexId, std::uint64_t> visits;
    VertexId y = y0;
    ++visits[y];
    for (std::uint64_t u = 0; u < q; ++u) ++visits[y = g.step(y, s)];
    VertexId x = x0;
    std::uint64_t count = 0;
    for (std::uint64_t t = 0;; ++t) {
      if (auto it = visits.find(x); it != visits.end()) count += it->second;
      if (t == q) break;
      x = g.step(x, s);
    }
    return static_cast<double>(count);
  });
  return EstimateWithCI::from_samples(counts, "hypercube/pair-count");
}

double hypercube_intersection_exact(int n, std::uint64_t q, double holding) {
  if (n < 1 || n > 62) throw GraphError("hypercube bits must be in [1, 62]");
  const auto N = static_cast<std::size_t>(n);
  // Law of the Hamming weight of X_0 xor Y_0: uniform over non-zero masks.
  std::vector<double> w(N + 1, 0.0);
  const double total = std::ldexp(1.0, n) - 1.0;
  double binom = 1.0;
  for (std::size_t k = 1; k <= N; ++k) {
    binom = binom * static_cast<double>(N - k + 1) / static_cast<double>(k);
    w[k] = binom / total;
  }
  double expected = 0.0;
  std::vector<double> next(N + 1);
  for (std::uint64_t k = 0; k <= 2 * q; ++k) {
    // Number of (t, u) in [0, q]^2 with t + u = k.
    const double pairs = static_cast<double>(std::min(k, 2 * q - k) + 1);
    expected += pairs * w[0];
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t j = 0; j <= N; ++j) {
      const double p = w[j];
      if (p == 0.0) continue;
      next[j] += holding * p;
      const double move = (1.0 - holding) * p;
      if (j > 0) next[j - 1] += move * static_cast<double>(j) / static_cast<double>(N);
      if (j < N) next[j + 1] += move * static_cast<double>(N - j) / static_cast<double>(N);
    }
    w.swap(next);
  }
  return expected;
}

std::uint64_t hypercube_horizon(std::uint64_t tau, std::uint64_t vertex_count) {
  return static_cast<std::uint64_t>(
      std::floor(std::sqrt(static_cast<double>(tau) * std::sqrt(static_cast<double>(vertex_count)))));
}

}  // namespace ustlab
