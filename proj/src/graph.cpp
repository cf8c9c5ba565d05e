#include "ustlab/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace ustlab {

namespace {

constexpr std::uint64_t kMaxVertices = std::uint64_t{1} << 62;

std::uint64_t checked_pow(std::uint64_t base, int exp) {
  std::uint64_t out = 1;
  for (int i = 0; i < exp; ++i) {
    if (out > kMaxVertices / base) throw GraphError("graph too large for 64-bit vertex ids");
    out *= base;
  }
  return out;
}

void check_holding(double h) {
  if (!(h >= 0.0 && h <= 1.0)) throw GraphError("holding probability must lie in [0,1]");
}

}  // namespace

GraphFamily::GraphFamily(GraphKind kind, int dimension, std::uint64_t side, double holding)
    : kind_(kind), dimension_(dimension), side_(side), holding_(holding), vertex_count_(0) {
  check_holding(holding);
  switch (kind) {
    case GraphKind::Torus: {
      if (dimension < 1) throw GraphError("torus dimension must be >= 1");
      if (side < 2) throw GraphError("torus side must be >= 2");
      vertex_count_ = checked_pow(side, dimension);
      stride_.resize(dimension);
      std::uint64_t s = 1;
      for (int i = 0; i < dimension; ++i) {
        stride_[i] = s;
        s *= side;
      }
      break;
    }
    case GraphKind::Hypercube:
      if (dimension < 1) throw GraphError("hypercube needs at least one bit");
      if (dimension > 62) throw GraphError("hypercube too large for 64-bit vertex ids");
      vertex_count_ = std::uint64_t{1} << dimension;
      break;
    case GraphKind::Complete:
      if (side < 2) throw GraphError("complete graph needs m >= 2");
      if (side > kMaxVertices) throw GraphError("complete graph too large");
      vertex_count_ = side;
      break;
    case GraphKind::Ring:
      if (side < 3) throw GraphError("ring needs n >= 3");
      if (side > kMaxVertices) throw GraphError("ring too large");
      vertex_count_ = side;
      break;
  }
}

GraphFamily GraphFamily::torus(int dimension, std::uint64_t side, double holding) {
  return GraphFamily(GraphKind::Torus, dimension, side, holding);
}
GraphFamily GraphFamily::hypercube(int bits, double holding) {
  return GraphFamily(GraphKind::Hypercube, bits, 2, holding);
}
GraphFamily GraphFamily::complete(std::uint64_t m, double holding) {
  return GraphFamily(GraphKind::Complete, 1, m, holding);
}
GraphFamily GraphFamily::ring(std::uint64_t n, double holding) {
  return GraphFamily(GraphKind::Ring, 1, n, holding);
}

GraphFamily GraphFamily::with_holding(double holding) const {
  GraphFamily g = *this;
  check_holding(holding);
  g.holding_ = holding;
  return g;
}

int GraphFamily::degree() const {
  switch (kind_) {
    case GraphKind::Torus: return 2 * dimension_;
    case GraphKind::Hypercube: return dimension_;
    case GraphKind::Complete: return static_cast<int>(std::min<std::uint64_t>(side_, std::numeric_limits<int>::max()));
    case GraphKind::Ring: return 2;
  }
  return 0;
}

VertexId GraphFamily::move(VertexId v, RandomStream& rng) const {
  switch (kind_) {
    case GraphKind::Torus: {
      const std::uint64_t dir = rng.uniform_index(2 * static_cast<std::uint64_t>(dimension_));
      const std::uint64_t axis = dir >> 1;
      const std::uint64_t stride = stride_[axis];
      const std::uint64_t digit = (v / stride) % side_;
      if (dir & 1) return digit + 1 == side_ ? v - digit * stride : v + stride;
      return digit == 0 ? v + (side_ - 1) * stride : v - stride;
    }
    case GraphKind::Hypercube:
      return v ^ (std::uint64_t{1} << rng.uniform_index(static_cast<std::uint64_t>(dimension_)));
    case GraphKind::Complete:
      return rng.uniform_index(side_);
    case GraphKind::Ring:
      if (rng.uniform() < 0.5) return v + 1 == side_ ? 0 : v + 1;
      return v == 0 ? side_ - 1 : v - 1;
  }
  return v;
}

std::vector<VertexId> GraphFamily::neighbors(VertexId v) const {
  std::vector<VertexId> out;
  switch (kind_) {
    case GraphKind::Torus:
      for (int i = 0; i < dimension_; ++i) {
        const std::uint64_t stride = stride_[i];
        const std::uint64_t digit = (v / stride) % side_;
        out.push_back(digit + 1 == side_ ? v - digit * stride : v + stride);
        out.push_back(digit == 0 ? v + (side_ - 1) * stride : v - stride);
      }
      break;
    case GraphKind::Hypercube:
      for (int i = 0; i < dimension_; ++i) out.push_back(v ^ (std::uint64_t{1} << i));
      break;
    case GraphKind::Complete:
      out.resize(side_);
      for (std::uint64_t u = 0; u < side_; ++u) out[u] = u;
      break;
    case GraphKind::Ring:
      out.push_back(v + 1 == side_ ? 0 : v + 1);
      out.push_back(v == 0 ? side_ - 1 : v - 1);
      break;
  }
  return out;
}

std::vector<std::int64_t> GraphFamily::decode(VertexId v) const {
  if (!contains(v)) throw GraphError("vertex id out of range");
  switch (kind_) {
    case GraphKind::Torus: {
      std::vector<std::int64_t> c(dimension_);
      for (int i = 0; i < dimension_; ++i) {
        c[i] = static_cast<std::int64_t>(v % side_);
        v /= side_;
      }
      return c;
    }
    case GraphKind::Hypercube: {
      std::vector<std::int64_t> c(dimension_);
      for (int i = 0; i < dimension_; ++i) c[i] = (v >> i) & 1u;
      return c;
    }
    default:
      return {static_cast<std::int64_t>(v)};
  }
}

VertexId GraphFamily::encode(const std::vector<std::int64_t>& coords) const {
  auto check = [](bool ok) {
    if (!ok) throw GraphError("coordinates out of range");
  };
  switch (kind_) {
    case GraphKind::Torus: {
      check(coords.size() == static_cast<std::size_t>(dimension_));
      VertexId v = 0;
      for (int i = dimension_ - 1; i >= 0; --i) {
        check(coords[i] >= 0 && static_cast<std::uint64_t>(coords[i]) < side_);
        v = v * side_ + static_cast<std::uint64_t>(coords[i]);
      }
      return v;
    }
    case GraphKind::Hypercube: {
      check(coords.size() == static_cast<std::size_t>(dimension_));
      VertexId v = 0;
      for (int i = 0; i < dimension_; ++i) {
        check(coords[i] == 0 || coords[i] == 1);
        v |= static_cast<VertexId>(coords[i]) << i;
      }
      return v;
    }
    default:
      check(coords.size() == 1 && coords[0] >= 0 && static_cast<std::uint64_t>(coords[0]) < side_);
      return static_cast<VertexId>(coords[0]);
  }
}

std::string GraphFamily::to_string() const {
  std::ostringstream os;
  switch (kind_) {
    case GraphKind::Torus: os << "torus:d=" << dimension_ << ",n=" << side_; break;
    case GraphKind::Hypercube: os << "hypercube:n=" << dimension_; break;
    case GraphKind::Complete: os << "complete:m=" << side_; break;
    case GraphKind::Ring: os << "ring:n=" << side_; break;
  }
  os << ",holding=" << holding_;
  return os.str();
}

GraphFamily parse_graph_spec(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) throw GraphError("graph spec needs 'kind:key=value,...': " + std::string(spec));
  const std::string kind(spec.substr(0, colon));
  std::map<std::string, std::string> kv;
  std::string_view rest = spec.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) throw GraphError("malformed graph parameter: " + std::string(item));
    const std::string key(item.substr(0, eq));
    if (kv.count(key)) throw GraphError("duplicate graph parameter: " + key);
    kv[key] = std::string(item.substr(eq + 1));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  auto take_uint = [&](const std::string& key) -> std::uint64_t {
    auto it = kv.find(key);
    if (it == kv.end()) throw GraphError("graph spec '" + std::string(spec) + "' is missing " + key);
    std::uint64_t v = 0;
    const auto& s = it->second;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw GraphError("bad integer for " + key + ": " + s);
    kv.erase(it);
    return v;
  };
  double holding = 0.5;
  if (auto it = kv.find("holding"); it != kv.end()) {
    try {
      std::size_t used = 0;
      holding = std::stod(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw GraphError("bad holding value: " + it->second);
    }
    kv.erase(it);
  }
  GraphFamily g = [&] {
    if (kind == "torus") {
      const auto d = take_uint("d");
      const auto n = take_uint("n");
      if (d > 64) throw GraphError("torus dimension too large");
      return GraphFamily::torus(static_cast<int>(d), n, holding);
    }
    if (kind == "hypercube") {
      const auto n = take_uint("n");
      if (n > 62) throw GraphError("hypercube too large for 64-bit vertex ids");
      return GraphFamily::hypercube(static_cast<int>(n), holding);
    }
    if (kind == "complete") return GraphFamily::complete(take_uint("m"), holding);
    if (kind == "ring") return GraphFamily::ring(take_uint("n"), holding);
    throw GraphError("unknown graph kind: " + kind);
  }();
  if (!kv.empty()) throw GraphError("unknown graph parameter: " + kv.begin()->first);
  return g;
}

StopRule StopRule::killing(double mean) {
  if (!(mean >= 1.0)) throw GraphError("killing mean must be >= 1");
  StopRule r;
  r.kind = Kind::GeometricKilling;
  r.mean = mean;
  return r;
}

StopRule StopRule::hit(const GraphFamily& g, const std::vector<VertexId>& set) {
  StopRule r;
  r.kind = Kind::HitSet;
  r.targets.assign(g.vertex_count(), 0);
  for (VertexId v : set) {
    if (!g.contains(v)) throw GraphError("target vertex out of range");
    r.targets[v] = 1;
  }
  return r;
}

StopRule StopRule::fixed(std::uint64_t length) {
  StopRule r;
  r.kind = Kind::FixedLength;
  r.length = length;
  return r;
}

WalkPath walk(const GraphFamily& g, VertexId start, const StopRule& stop, RandomStream& rng) {
  if (!g.contains(start)) throw GraphError("start vertex out of range");
  WalkPath path;
  path.vertices.push_back(start);
  VertexId v = start;
  switch (stop.kind) {
    case StopRule::Kind::FixedLength:
      path.vertices.reserve(stop.length + 1);
      for (std::uint64_t t = 0; t < stop.length; ++t) path.vertices.push_back(v = g.step(v, rng));
      path.stop_reason = StopReason::LengthCap;
      break;
    case StopRule::Kind::GeometricKilling: {
      const std::uint64_t T = rng.geometric(1.0 / stop.mean);
      for (std::uint64_t t = 0; t < T; ++t) path.vertices.push_back(v = g.step(v, rng));
      path.stop_reason = StopReason::Killed;
      break;
    }
    case StopRule::Kind::HitSet: {
      if (stop.targets.size() != g.vertex_count()) throw GraphError("hit-set rule built for a different graph");
      path.stop_reason = StopReason::HitSet;
      std::uint64_t t = 0;
      while (!stop.targets[v]) {
        if (stop.cap != 0 && t == stop.cap) {
          path.stop_reason = StopReason::LengthCap;
          break;
        }
        path.vertices.push_back(v = g.step(v, rng));
        ++t;
      }
      break;
    }
  }
  return path;
}

Eigen::SparseMatrix<double, Eigen::RowMajor> transition_matrix(const GraphFamily& g) {
  const auto n = g.vertex_count();
  if (n > (std::uint64_t{1} << 26)) throw GraphError("transition matrix too large");
  const double h = g.holding();
  std::vector<Eigen::Triplet<double>> trips;
  const bool complete = g.kind() == GraphKind::Complete;
  trips.reserve(static_cast<std::size_t>(n) * (complete ? n + 1 : g.degree() + 1));
  for (VertexId v = 0; v < n; ++v) {
    const auto idx = static_cast<Eigen::Index>(v);
    if (h > 0) trips.emplace_back(idx, idx, h);
    const auto nb = g.neighbors(v);
    const double w = (1.0 - h) / static_cast<double>(nb.size());
    for (VertexId u : nb) trips.emplace_back(idx, static_cast<Eigen::Index>(u), w);
  }
  Eigen::SparseMatrix<double, Eigen::RowMajor> P(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  P.setFromTriplets(trips.begin(), trips.end());  // duplicates are summed
  return P;
}

Eigen::VectorXd stationary_distribution(const GraphFamily& g) {
  const auto n = static_cast<Eigen::Index>(g.vertex_count());
  if (n > 4096) throw GraphError("dense stationary solve limited to 4096 vertices");
  const Eigen::MatrixXd P = Eigen::MatrixXd(transition_matrix(g));
  Eigen::MatrixXd A = P.transpose() - Eigen::MatrixXd::Identity(n, n);
  A.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  return A.fullPivLu().solve(b);
}

std::string to_string(MixingMethod m) {
  switch (m) {
    case MixingMethod::ClosedForm: return "closed-form";
    case MixingMethod::DensePower: return "dense-power";
    case MixingMethod::LumpedOrbit: return "lumped-orbit";
  }
  return "?";
}

namespace {

constexpr std::uint64_t kMaxMixingSteps = 10'000'000;

bool is_bipartite(const GraphFamily& g) {
  switch (g.kind()) {
    case GraphKind::Torus:
    case GraphKind::Ring: return g.side() % 2 == 0;
    case GraphKind::Hypercube: return true;
    case GraphKind::Complete: return false;
  }
  return false;
}

/// Exact walk lumped onto orbits of a symmetry group fixing vertex 0.
struct LumpedChain {
  Eigen::SparseMatrix<double, Eigen::RowMajor> P;  // orbit-to-orbit transition probabilities
  Eigen::VectorXd orbit_size;                         // number of vertices per orbit
  Eigen::Index origin = 0;                            // orbit of vertex 0
};

LumpedChain lumped_torus(const GraphFamily& g, std::uint64_t cap) {
  const int d = g.dimension();
  const auto n = static_cast<std::int64_t>(g.side());
  const std::int64_t half = n / 2;
  // Enumerate non-decreasing sequences in [0, half]^d.
  std::map<std::vector<std::int64_t>, Eigen::Index> index;
  std::vector<std::vector<std::int64_t>> states;
  std::vector<std::int64_t> cur(d, 0);
  for (;;) {
    index.emplace(cur, static_cast<Eigen::Index>(states.size()));
    states.push_back(cur);
    if (states.size() > cap) throw GraphError("mixing time unavailable: orbit chain exceeds cap");
    int i = d - 1;
    while (i >= 0 && cur[i] == half) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < d; ++j) cur[j] = cur[i];
  }
  auto fold = [&](std::int64_t x) {
    x = ((x % n) + n) % n;
    return std::min(x, n - x);
  };
  const double h = g.holding();
  const double w = (1.0 - h) / (2.0 * d);
  std::vector<Eigen::Triplet<double>> trips;
  Eigen::VectorXd size(static_cast<Eigen::Index>(states.size()));
  for (std::size_t s = 0; s < states.size(); ++s) {
    const auto& a = states[s];
    const auto row = static_cast<Eigen::Index>(s);
    if (h > 0) trips.emplace_back(row, row, h);
    for (int i = 0; i < d; ++i) {
      for (int sign : {-1, 1}) {
        auto b = a;
        b[i] = fold(a[i] + sign);
        std::sort(b.begin(), b.end());
        trips.emplace_back(row, index.at(b), w);
      }
    }
    // Orbit size: distinct permutations times reflection multiplicity.
    double count = std::tgamma(d + 1.0);
    for (std::size_t i = 0; i < a.size();) {
      std::size_t j = i;
      while (j < a.size() && a[j] == a[i]) ++j;
      count /= std::tgamma(static_cast<double>(j - i) + 1.0);
      i = j;
    }
    for (auto x : a) {
      if (x != 0 && !(n % 2 == 0 && x == half)) count *= 2.0;
    }
    size(row) = std::round(count);
  }
  LumpedChain c;
  c.P.resize(static_cast<Eigen::Index>(states.size()), static_cast<Eigen::Index>(states.size()));
  c.P.setFromTriplets(trips.begin(), trips.end());
  c.orbit_size = size;
  c.origin = 0;
  return c;
}

LumpedChain lumped_hypercube(const GraphFamily& g, std::uint64_t cap) {
  const int n = g.dimension();
  if (static_cast<std::uint64_t>(n) + 1 > cap) throw GraphError("mixing time unavailable: orbit chain exceeds cap");
  const double h = g.holding();
  std::vector<Eigen::Triplet<double>> trips;
  Eigen::VectorXd size(n + 1);
  for (int w = 0; w <= n; ++w) {
    if (h > 0) trips.emplace_back(w, w, h);
    if (w > 0) trips.emplace_back(w, w - 1, (1.0 - h) * w / n);
    if (w < n) trips.emplace_back(w, w + 1, (1.0 - h) * (n - w) / n);
    size(w) = std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(w + 1.0) - std::lgamma(n - w + 1.0)));
  }
  LumpedChain c;
  c.P.resize(n + 1, n + 1);
  c.P.setFromTriplets(trips.begin(), trips.end());
  c.orbit_size = size;
  return c;
}

}  // namespace

MixingTime mixing_time(const GraphFamily& g, std::uint64_t cap) {
  const double h = g.holding();
  const double N = static_cast<double>(g.vertex_count());
  if (g.kind() == GraphKind::Complete) {
    // p^t(o) = h^t + (1 - h^t)/m, so the sup deviation is h^t (m - 1).
    if (h >= 1.0) throw GraphError("mixing time unavailable: walk never moves");
    std::uint64_t t = 1;
    double ht = h;
    while (ht * (N - 1.0) > 0.5) {
      ht *= h;
      ++t;
    }
    return {t, MixingMethod::ClosedForm};
  }
  if (h >= 1.0) throw GraphError("mixing time unavailable: walk never moves");
  if (h == 0.0 && is_bipartite(g)) throw GraphError("mixing time unavailable: walk is periodic (set holding > 0)");

  if (g.vertex_count() <= cap) {
    const auto P = transition_matrix(g);
    const Eigen::SparseMatrix<double, Eigen::ColMajor> PT = P.transpose();
    Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.vertex_count()));
    p(0) = 1.0;
    for (std::uint64_t t = 0; t < kMaxMixingSteps; ++t) {
      if ((p.array() * N - 1.0).abs().maxCoeff() <= 0.5) return {t, MixingMethod::DensePower};
      p = PT * p;
    }
    throw GraphError("mixing time unavailable: no convergence");
  }
  const LumpedChain c = g.kind() == GraphKind::Hypercube ? lumped_hypercube(g, cap) : lumped_torus(g, cap);
  const Eigen::SparseMatrix<double, Eigen::ColMajor> PT = c.P.transpose();
  Eigen::VectorXd p = Eigen::VectorXd::Zero(c.orbit_size.size());
  p(c.origin) = 1.0;
  for (std::uint64_t t = 0; t < kMaxMixingSteps; ++t) {
    if ((p.array() / c.orbit_size.array() * N - 1.0).abs().maxCoeff() <= 0.5) return {t, MixingMethod::LumpedOrbit};
    p = PT * p;
  }
  throw GraphError("mixing time unavailable: no convergence");
}

Eigen::VectorXd distribution_after(const GraphFamily& g, std::uint64_t t) {
  const auto P = transition_matrix(g);
  const Eigen::SparseMatrix<double, Eigen::ColMajor> PT = P.transpose();
  Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.vertex_count()));
  p(0) = 1.0;
  for (std::uint64_t i = 0; i < t; ++i) p = PT * p;
  return p;
}

double local_transience_sum(const GraphFamily& g, std::uint64_t horizon) {
  const auto P = transition_matrix(g);
  const Eigen::SparseMatrix<double, Eigen::ColMajor> PT = P.transpose();
  Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.vertex_count()));
  p(0) = 1.0;
  Eigen::VectorXd acc = p;
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    p = PT * p;
    acc += static_cast<double>(t + 1) * p;
  }
  return acc.maxCoeff();
}

}  // namespace ustlab
