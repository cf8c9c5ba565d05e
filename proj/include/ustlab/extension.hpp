#pragma once

#include <cmath>
#include <limits>
#include <unordered_set>

#include "ustlab/graph.hpp"

namespace ustlab {

using VertexSet = std::unordered_set<VertexId>;

/// A base graph plus a root vertex rho. Each step the walk jumps to rho with
/// probability 1/kill_mean, so the jump time is geometric on {1, 2, ...} with
/// mean kill_mean and independent of the base trajectory.
struct RootedExtension {
  GraphFamily base;
  double kill_mean;

  /// rho is encoded one past the last base vertex.
  VertexId root() const { return base.vertex_count(); }
  bool is_root(VertexId v) const { return v == root(); }
  double kill_probability() const { return std::isinf(kill_mean) ? 0.0 : 1.0 / kill_mean; }
};

/// kill_mean must exceed 1; +infinity gives an extension that never kills.
RootedExtension extend(const GraphFamily& g, double kill_mean);

/// kill_mean = L |G|^{1/2}.
RootedExtension extend_scaled(const GraphFamily& g, double L);

/// Walk from `start` until it hits `absorb` or jumps to rho. In the second
/// case the final element is rho and the stop reason is Killed.
WalkPath killed_walk(const RootedExtension& e, VertexId start, const VertexSet& absorb, RandomStream& rng);

/// Kill-mean schedule for the complete-graph extension that matches a
/// segment-level walk on G^(L):
///   L~ = m^{-1/2} [1 - (1 - 1/(L |G|^{1/2}))^r]^{-1}.
struct LtildeSchedule {
  double L;
  std::uint64_t r;
  std::uint64_t m;
  double vertex_count;

  double ltilde() const {
    const double p = 1.0 / (L * std::sqrt(vertex_count));
    const double hit = -std::expm1(static_cast<double>(r) * std::log1p(-p));
    return 1.0 / (std::sqrt(static_cast<double>(m)) * hit);
  }
  /// Kill mean of the complete-graph extension, L~ sqrt(m).
  double complete_kill_mean() const { return ltilde() * std::sqrt(static_cast<double>(m)); }
};

}  // namespace ustlab
