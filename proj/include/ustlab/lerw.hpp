#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ustlab/graph.hpp"

namespace ustlab {

enum class ErasureMode { Chronological, Local };

/// Result of a (local) loop-erasure: vertices[k] == path[retained_times[k]].
struct LoopErasedPath {
  std::vector<VertexId> vertices;
  std::vector<std::size_t> retained_times;
  ErasureMode mode = ErasureMode::Chronological;
  std::size_t window = 0;  // s, for Local mode

  std::size_t size() const { return vertices.size(); }
  /// Number of edges of the erased path.
  std::size_t length() const { return vertices.empty() ? 0 : vertices.size() - 1; }
};

class ScaleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scale hierarchy tau < s < q < r used for segment decompositions.
struct ScaleSet {
  std::uint64_t tau = 0;
  std::uint64_t s = 0;
  std::uint64_t q = 0;
  std::uint64_t r = 0;

  /// s = floor(tau^{3/4} |G|^{1/8}), q = floor(tau^{1/2} |G|^{1/4}),
  /// r = floor(tau^{1/4} |G|^{3/8}). Throws ScaleError unless s < q < r.
  static ScaleSet standard(std::uint64_t tau, std::uint64_t vertex_count);
  /// Explicit scales; throws ScaleError unless 0 < s < q < r and tau > 0.
  static ScaleSet explicit_scales(std::uint64_t tau, std::uint64_t s, std::uint64_t q, std::uint64_t r);

  /// First and last time of A_i = [(i-1)r + 2s + 1, ir - s], i >= 1.
  std::int64_t segment_first(std::size_t i) const { return static_cast<std::int64_t>((i - 1) * r + 2 * s + 1); }
  std::int64_t segment_last(std::size_t i) const { return static_cast<std::int64_t>(i * r) - static_cast<std::int64_t>(s); }
  /// |A_i| before truncation; zero when 3s >= r.
  std::uint64_t segment_length() const { return r > 3 * s ? r - 3 * s : 0; }

  std::string to_string() const;
};

/// Chronological loop-erasure. When a loop closes, the earlier time index of
/// the repeated vertex is dropped and the new one retained.
LoopErasedPath loop_erase(std::span<const VertexId> path);
inline LoopErasedPath loop_erase(const WalkPath& p) { return loop_erase(p.vertices); }

/// Times u <= T such that LE<X_t>_{max(0,u-s)}^{u} and {X_t}_{u+1}^{min(T,u+s)}
/// are disjoint.
std::vector<std::size_t> locally_retained_times(std::span<const VertexId> path, std::size_t s);

LoopErasedPath local_loop_erase(std::span<const VertexId> path, std::size_t s);
inline LoopErasedPath local_loop_erase(const WalkPath& p, std::size_t s) { return local_loop_erase(p.vertices, s); }

/// Times u with {X_{u-tau..u-1}} and {X_{u+1..u+tau}} disjoint (windows truncated at the ends).
std::vector<std::size_t> local_cutpoints(std::span<const VertexId> path, std::size_t tau);

/// True if some pair t < u with X_t == X_u has u - t in [min_gap, max_gap].
bool has_loop_with_gap(std::span<const VertexId> path, std::size_t min_gap, std::size_t max_gap);

enum class IndexClass { Good, SingleIntersection, Bad };

struct Segment {
  std::size_t index;  // i >= 1
  std::size_t first;  // inclusive, within [0, T]
  std::size_t last;   // inclusive
  std::vector<VertexId> local_erasure;  // LE_s(A_i), in time order
};

struct SegmentDecomposition {
  ScaleSet scales;
  std::size_t ell = 0;                // ceil(T / r)
  std::vector<Segment> segments;      // non-empty A_i only
  std::vector<IndexClass> labels;     // labels[i-1] for i = 1..ell
  std::vector<std::size_t> retained;  // locally retained times of the whole path

  const Segment* segment(std::size_t i) const;
};

/// A_i windows, LE_s(A_i) and the good / single-intersection / bad labels.
/// Index i is good when the trace of A_i avoids the trace of every time
/// outside the block [(i-1)r, ir]; it is a single intersection when some
/// A_j (j != i) meets it and every outside hit lies in block j.
SegmentDecomposition decompose(std::span<const VertexId> path, const ScaleSet& scales);

/// Survivor recursion shared by the G and K index sequences:
///   S_0 = <0>,  S_j = <k in S_{j-1} : I(i, j) = 0 for all i <= k, i in S_{j-1}> * <j>.
template <typename Indicator>
std::vector<std::size_t> survivor_sequence(std::size_t steps, Indicator&& intersects) {
  std::vector<std::size_t> seq{0};
  for (std::size_t j = 1; j <= steps; ++j) {
    std::size_t keep = seq.size();
    for (std::size_t p = 0; p < seq.size(); ++p) {
      if (intersects(seq[p], j)) {
        keep = p;
        break;
      }
    }
    seq.resize(keep);
    seq.push_back(j);
  }
  return seq;
}

/// G_ell with I_ij = 1 iff LE_s(A_i) meets {X_t}_{t in A_j}; index 0 has an
/// empty erasure and never intersects.
std::vector<std::size_t> index_sequence_G(std::span<const VertexId> path, const ScaleSet& scales);
std::vector<std::size_t> index_sequence_G(const SegmentDecomposition& dec, std::span<const VertexId> path);

/// K_T from an explicit indicator matrix (entry (i, j) read for i < j <= T).
template <typename Derived>
std::vector<std::size_t> index_sequence_K(const Eigen::DenseBase<Derived>& indicators, std::size_t T) {
  if (static_cast<std::size_t>(indicators.rows()) <= T || static_cast<std::size_t>(indicators.cols()) <= T)
    throw std::invalid_argument("indicator matrix smaller than T+1");
  return survivor_sequence(T, [&](std::size_t i, std::size_t j) {
    return static_cast<bool>(indicators(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
  });
}

/// K sequence of a killed walk on the complete-graph extension, sampled from
/// the indicators alone: the walk runs on K_m for T - 1 steps and is at rho at
/// time T. Each new time hits each surviving earlier index with probability 1/m.
std::vector<std::size_t> sample_index_sequence_K(std::uint64_t m, std::uint64_t T, RandomStream& rng);

using CapacityOracle = std::function<double(std::span<const VertexId>)>;

struct DecomposabilityReport {
  bool decomposable = true;
  int violated = 0;  // 1..6, first failed condition; 0 if none
  std::string detail;
};

/// Evaluates the six locally-decomposable conditions in order and reports the
/// first one that fails. `capacity` returns Cap_r of a vertex list.
DecomposabilityReport is_locally_decomposable(std::span<const VertexId> path, const ScaleSet& scales, double alpha,
                                              double gamma, std::uint64_t vertex_count,
                                              const CapacityOracle& capacity);

/// Loop-erasure maintained step by step; the erased path lives on a stack
/// with an O(1) position index. Reused across replicates via `reset`.
class IncrementalEraser {
 public:
  explicit IncrementalEraser(std::uint64_t id_space) : pos_(id_space, kAbsent) {}

  void reset() {
    for (VertexId v : stack_) pos_[v] = kAbsent;
    stack_.clear();
  }
  void push(VertexId v) {
    auto& p = pos_[v];
    if (p != kAbsent) {
      for (std::size_t k = p + 1; k < stack_.size(); ++k) pos_[stack_[k]] = kAbsent;
      stack_.resize(p + 1);
      return;
    }
    p = stack_.size();
    stack_.push_back(v);
  }
  const std::vector<VertexId>& path() const { return stack_; }

 private:
  static constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);
  std::vector<std::size_t> pos_;
  std::vector<VertexId> stack_;
};

}  // namespace ustlab
