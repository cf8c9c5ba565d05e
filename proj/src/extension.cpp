#include "ustlab/extension.hpp"

namespace ustlab {

RootedExtension extend(const GraphFamily& g, double kill_mean) {
  if (!(kill_mean > 1.0)) throw GraphError("kill_mean must be > 1");
  return RootedExtension{g, kill_mean};
}

RootedExtension extend_scaled(const GraphFamily& g, double L) {
  if (!(L > 0.0)) throw GraphError("L must be > 0");
  return extend(g, L * std::sqrt(static_cast<double>(g.vertex_count())));
}

WalkPath killed_walk(const RootedExtension& e, VertexId start, const VertexSet& absorb, RandomStream& rng) {
  if (!e.base.contains(start)) throw GraphError("killed walk must start in the base graph");
  WalkPath path;
  path.vertices.push_back(start);
  path.stop_reason = StopReason::HitSet;
  if (absorb.count(start)) return path;
  const double p = e.kill_probability();
  const std::uint64_t kill_at = p > 0.0 ? rng.geometric(p) : std::numeric_limits<std::uint64_t>::max();
  VertexId v = start;
  for (std::uint64_t t = 1;; ++t) {
    if (t == kill_at) {
      path.vertices.push_back(e.root());
      path.stop_reason = StopReason::Killed;
      return path;
    }
    v = e.base.step(v, rng);
    path.vertices.push_back(v);
    if (absorb.count(v)) return path;
  }
}

}  // namespace ustlab
