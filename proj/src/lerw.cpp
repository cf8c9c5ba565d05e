#include "ustlab/lerw.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace ustlab {

ScaleSet ScaleSet::explicit_scales(std::uint64_t tau, std::uint64_t s, std::uint64_t q, std::uint64_t r) {
  if (tau == 0 || s == 0) throw ScaleError("scales must be positive: " + ScaleSet{tau, s, q, r}.to_string());
  if (!(s < q && q < r)) throw ScaleError("scales must satisfy s < q < r: " + ScaleSet{tau, s, q, r}.to_string());
  return ScaleSet{tau, s, q, r};
}

ScaleSet ScaleSet::standard(std::uint64_t tau, std::uint64_t vertex_count) {
  const double t = static_cast<double>(tau);
  const double G = static_cast<double>(vertex_count);
  const auto s = static_cast<std::uint64_t>(std::floor(std::pow(t, 0.75) * std::pow(G, 0.125)));
  const auto q = static_cast<std::uint64_t>(std::floor(std::pow(t, 0.5) * std::pow(G, 0.25)));
  const auto r = static_cast<std::uint64_t>(std::floor(std::pow(t, 0.25) * std::pow(G, 0.375)));
  try {
    return explicit_scales(tau, s, q, r);
  } catch (const ScaleError& e) {
    throw ScaleError(std::string("standard scales collapse for |G|=") + std::to_string(vertex_count) + ": " +
                     e.what());
  }
}

std::string ScaleSet::to_string() const {
  std::ostringstream os;
  os << "tau=" << tau << ",s=" << s << ",q=" << q << ",r=" << r;
  return os.str();
}

LoopErasedPath loop_erase(std::span<const VertexId> path) {
  LoopErasedPath out;
  out.mode = ErasureMode::Chronological;
  std::unordered_map<VertexId, std::size_t> pos;
  pos.reserve(path.size());
  for (std::size_t t = 0; t < path.size(); ++t) {
    const VertexId v = path[t];
    auto [it, inserted] = pos.try_emplace(v, out.vertices.size());
    if (!inserted) {
      const std::size_t p = it->second;
      for (std::size_t k = p + 1; k < out.vertices.size(); ++k) pos.erase(out.vertices[k]);
      out.vertices.resize(p + 1);
      out.retained_times.resize(p + 1);
      out.retained_times[p] = t;
      continue;
    }
    out.vertices.push_back(v);
    out.retained_times.push_back(t);
  }
  return out;
}

std::vector<std::size_t> locally_retained_times(std::span<const VertexId> path, std::size_t s) {
  if (s == 0) throw std::invalid_argument("local loop-erasure window must be >= 1");
  std::vector<std::size_t> out;
  if (path.empty()) return out;
  const std::size_t T = path.size() - 1;
  std::unordered_map<VertexId, std::size_t> pos;
  std::vector<VertexId> stack;
  pos.reserve(2 * s + 2);
  for (std::size_t u = 0; u <= T; ++u) {
    const std::size_t lo = u >= s ? u - s : 0;
    pos.clear();
    stack.clear();
    for (std::size_t t = lo; t <= u; ++t) {
      auto [it, inserted] = pos.try_emplace(path[t], stack.size());
      if (!inserted) {
        for (std::size_t k = it->second + 1; k < stack.size(); ++k) pos.erase(stack[k]);
        stack.resize(it->second + 1);
      } else {
        stack.push_back(path[t]);
      }
    }
    const std::size_t hi = std::min(T, u + s);
    bool retained = true;
    for (std::size_t t = u + 1; t <= hi; ++t) {
      if (pos.count(path[t])) {
        retained = false;
        break;
      }
    }
    if (retained) out.push_back(u);
  }
  return out;
}

LoopErasedPath local_loop_erase(std::span<const VertexId> path, std::size_t s) {
  LoopErasedPath out;
  out.mode = ErasureMode::Local;
  out.window = s;
  out.retained_times = locally_retained_times(path, s);
  out.vertices.reserve(out.retained_times.size());
  for (std::size_t t : out.retained_times) out.vertices.push_back(path[t]);
  return out;
}

std::vector<std::size_t> local_cutpoints(std::span<const VertexId> path, std::size_t tau) {
  if (tau == 0) throw std::invalid_argument("cutpoint window must be >= 1");
  std::vector<std::size_t> out;
  if (path.empty()) return out;
  const std::size_t T = path.size() - 1;
  struct Counts {
    int past = 0;
    int future = 0;
  };
  std::unordered_map<VertexId, Counts> counts;
  counts.reserve(4 * tau + 4);
  std::size_t common = 0;
  auto add_past = [&](VertexId v) {
    auto& c = counts[v];
    if (c.past++ == 0 && c.future > 0) ++common;
  };
  auto remove_past = [&](VertexId v) {
    auto& c = counts[v];
    if (--c.past == 0 && c.future > 0) --common;
  };
  auto add_future = [&](VertexId v) {
    auto& c = counts[v];
    if (c.future++ == 0 && c.past > 0) ++common;
  };
  auto remove_future = [&](VertexId v) {
    auto& c = counts[v];
    if (--c.future == 0 && c.past > 0) --common;
  };
  for (std::size_t t = 1; t <= std::min(T, tau); ++t) add_future(path[t]);
  for (std::size_t u = 0;; ++u) {
    if (common == 0) out.push_back(u);
    if (u == T) break;
    // Slide to u + 1.
    add_past(path[u]);
    if (u >= tau) remove_past(path[u - tau]);
    remove_future(path[u + 1]);
    if (u + 1 + tau <= T) add_future(path[u + 1 + tau]);
  }
  return out;
}

bool has_loop_with_gap(std::span<const VertexId> path, std::size_t min_gap, std::size_t max_gap) {
  if (min_gap > max_gap) return false;
  std::unordered_map<VertexId, std::vector<std::size_t>> occ;
  for (std::size_t t = 0; t < path.size(); ++t) occ[path[t]].push_back(t);
  for (const auto& [v, times] : occ) {
    if (times.size() < 2) continue;
    for (std::size_t a : times) {
      auto it = std::lower_bound(times.begin(), times.end(), a + std::max<std::size_t>(min_gap, 1));
      if (it != times.end() && *it - a <= max_gap) return true;
    }
  }
  return false;
}

const Segment* SegmentDecomposition::segment(std::size_t i) const {
  for (const auto& seg : segments)
    if (seg.index == i) return &seg;
  return nullptr;
}

SegmentDecomposition decompose(std::span<const VertexId> path, const ScaleSet& scales) {
  SegmentDecomposition dec;
  dec.scales = scales;
  if (path.empty()) return dec;
  const std::size_t T = path.size() - 1;
  const std::size_t r = scales.r;
  dec.ell = (T + r - 1) / r;
  dec.retained = locally_retained_times(path, scales.s);
  std::vector<char> is_retained(T + 1, 0);
  for (std::size_t t : dec.retained) is_retained[t] = 1;

  for (std::size_t i = 1; i <= dec.ell; ++i) {
    const std::int64_t first = std::max<std::int64_t>(0, scales.segment_first(i));
    const std::int64_t last = std::min<std::int64_t>(static_cast<std::int64_t>(T), scales.segment_last(i));
    if (first > last) continue;
    Segment seg{i, static_cast<std::size_t>(first), static_cast<std::size_t>(last), {}};
    for (std::size_t t = seg.first; t <= seg.last; ++t)
      if (is_retained[t]) seg.local_erasure.push_back(path[t]);
    dec.segments.push_back(std::move(seg));
  }

  dec.labels.assign(dec.ell, IndexClass::Good);
  auto in_block = [r](std::size_t t, std::size_t j) { return t + r >= j * r && t <= j * r; };
  for (const auto& seg : dec.segments) {
    const std::size_t i = seg.index;
    std::unordered_set<VertexId> trace(path.begin() + static_cast<std::ptrdiff_t>(seg.first),
                                       path.begin() + static_cast<std::ptrdiff_t>(seg.last) + 1);
    std::vector<std::size_t> hits;  // times outside block i landing on the trace of A_i
    for (std::size_t t = 0; t <= T; ++t)
      if (!in_block(t, i) && trace.count(path[t])) hits.push_back(t);
    if (hits.empty()) continue;
    IndexClass label = IndexClass::Bad;
    for (const auto& other : dec.segments) {
      const std::size_t j = other.index;
      if (j == i) continue;
      const bool confined = std::all_of(hits.begin(), hits.end(), [&](std::size_t t) { return in_block(t, j); });
      if (!confined) continue;
      const bool meets = std::any_of(hits.begin(), hits.end(),
                                     [&](std::size_t t) { return t >= other.first && t <= other.last; });
      if (meets) {
        label = IndexClass::SingleIntersection;
        break;
      }
    }
    dec.labels[i - 1] = label;
  }
  return dec;
}

std::vector<std::size_t> index_sequence_G(const SegmentDecomposition& dec, std::span<const VertexId> path) {
  std::vector<std::unordered_set<VertexId>> erased(dec.ell + 1);
  std::vector<const Segment*> by_index(dec.ell + 1, nullptr);
  for (const auto& seg : dec.segments) {
    erased[seg.index].insert(seg.local_erasure.begin(), seg.local_erasure.end());
    by_index[seg.index] = &seg;
  }
  auto intersects = [&](std::size_t i, std::size_t j) {
    if (i == 0 || erased[i].empty() || by_index[j] == nullptr) return false;
    for (std::size_t t = by_index[j]->first; t <= by_index[j]->last; ++t)
      if (erased[i].count(path[t])) return true;
    return false;
  };
  return survivor_sequence(dec.ell, intersects);
}

std::vector<std::size_t> index_sequence_G(std::span<const VertexId> path, const ScaleSet& scales) {
  return index_sequence_G(decompose(path, scales), path);
}

std::vector<std::size_t> sample_index_sequence_K(std::uint64_t m, std::uint64_t T, RandomStream& rng) {
  std::vector<std::size_t> seq{0};
  for (std::uint64_t j = 1; j < T; ++j) {
    // The survivors sit on distinct vertices; the new position is uniform.
    const std::uint64_t u = rng.uniform_index(m);
    if (u < seq.size()) seq.resize(u);
    seq.push_back(j);
  }
  if (T >= 1) seq.push_back(T);
  return seq;
}

DecomposabilityReport is_locally_decomposable(std::span<const VertexId> path, const ScaleSet& scales, double alpha,
                                              double gamma, std::uint64_t vertex_count,
                                              const CapacityOracle& capacity) {
  DecomposabilityReport rep;
  auto fail = [&](int cond, std::string detail) {
    rep.decomposable = false;
    rep.violated = cond;
    rep.detail = std::move(detail);
    return rep;
  };
  if (path.empty()) return rep;
  const std::size_t T = path.size() - 1;
  const double r = static_cast<double>(scales.r);
  const double s = static_cast<double>(scales.s);
  const double G = static_cast<double>(vertex_count);
  const SegmentDecomposition dec = decompose(path, scales);

  for (std::size_t i = 1; i <= dec.ell; ++i)
    if (dec.labels[i - 1] == IndexClass::Bad) return fail(1, "index " + std::to_string(i) + " is bad");

  const double length_tol = 2.0 * r * std::pow(s / r, 1.0 / 6.0);
  for (std::size_t i = 1; i <= dec.ell; ++i) {
    const Segment* seg = dec.segment(i);
    const double len = seg ? static_cast<double>(seg->local_erasure.size()) : 0.0;
    if (std::abs(len - gamma * r) > length_tol)
      return fail(2, "|LE_s(A_" + std::to_string(i) + ")|=" + std::to_string(len) + " outside gamma*r +- " +
                         std::to_string(length_tol));
  }

  const double cap_target = alpha * r * r / G;
  const double cap_tol = std::pow(r, 2.25) * std::pow(G, -1.125);
  for (std::size_t i = 1; i <= dec.ell; ++i) {
    const Segment* seg = dec.segment(i);
    const double cap = seg && !seg->local_erasure.empty() ? capacity(seg->local_erasure) : 0.0;
    if (std::abs(cap - cap_target) > cap_tol)
      return fail(3, "Cap_r(LE_s(A_" + std::to_string(i) + "))=" + std::to_string(cap) + " outside " +
                         std::to_string(cap_target) + " +- " + std::to_string(cap_tol));
  }

  if (has_loop_with_gap(path, scales.tau, scales.r))
    return fail(4, "loop with length in [tau, r]");

  std::vector<char> in_segment(T + 1, 0);
  for (const auto& seg : dec.segments)
    for (std::size_t t = seg.first; t <= seg.last; ++t) in_segment[t] = 1;
  std::unordered_map<VertexId, std::pair<std::size_t, std::size_t>> span_of;
  for (std::size_t t = 0; t <= T; ++t) {
    auto [it, inserted] = span_of.try_emplace(path[t], t, t);
    if (!inserted) it->second.second = t;
  }
  for (std::size_t t = 0; t <= T; ++t) {
    if (in_segment[t]) continue;
    const auto [lo, hi] = span_of.at(path[t]);
    if (t - lo >= scales.s || hi - t >= scales.s)
      return fail(5, "time " + std::to_string(t) + " outside the A_i meets a loop of length >= s");
  }

  if (T >= scales.s) {
    const auto cuts = local_cutpoints(path, scales.tau);
    std::vector<std::size_t> next(T + 2, T + 1);  // next cutpoint at or after t
    for (std::size_t c : cuts) next[c] = c;
    for (std::size_t t = T; t-- > 0;) next[t] = std::min(next[t], next[t + 1]);
    for (std::size_t t = 0; t + scales.s <= T; ++t)
      if (next[t] > t + scales.s) return fail(6, "no local cutpoint in [" + std::to_string(t) + ", t+s]");
  }
  return rep;
}

}  // namespace ustlab
