#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "ustlab/random.hpp"

namespace ustlab {

/// Packed vertex encoding. Torus: base-n digits, coordinate 0 least
/// significant. Hypercube: bitmask. Complete and ring: the index itself.
using VertexId = std::uint64_t;

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class GraphKind { Torus, Hypercube, Complete, Ring };

/// Vertex-transitive graph family with a lazy simple random walk.
///
/// The complete graph carries a self-loop at every vertex, so a non-holding
/// step is uniform over all m vertices.
class GraphFamily {
 public:
  static GraphFamily torus(int dimension, std::uint64_t side, double holding = 0.5);
  static GraphFamily hypercube(int bits, double holding = 0.5);
  static GraphFamily complete(std::uint64_t m, double holding = 0.5);
  static GraphFamily ring(std::uint64_t n, double holding = 0.5);

  GraphKind kind() const { return kind_; }
  int dimension() const { return dimension_; }
  /// Side length (torus, ring), bit count (hypercube) or vertex count (complete).
  std::uint64_t side() const { return side_; }
  double holding() const { return holding_; }
  std::uint64_t vertex_count() const { return vertex_count_; }
  /// Number of non-holding moves out of a vertex, counted with multiplicity.
  int degree() const;

  GraphFamily with_holding(double holding) const;

  /// Neighbours with multiplicity (a torus with side 2 lists the same vertex twice).
  std::vector<VertexId> neighbors(VertexId v) const;

  std::vector<std::int64_t> decode(VertexId v) const;
  VertexId encode(const std::vector<std::int64_t>& coords) const;

  bool contains(VertexId v) const { return v < vertex_count_; }

  /// One step of the lazy walk.
  VertexId step(VertexId v, RandomStream& rng) const {
    if (holding_ > 0.0 && rng.uniform() < holding_) return v;
    return move(v, rng);
  }
  /// One non-holding step: a uniform neighbour.
  VertexId move(VertexId v, RandomStream& rng) const;

  /// Canonical spec string, e.g. "torus:d=5,n=8,holding=0.5".
  std::string to_string() const;

 private:
  GraphFamily(GraphKind kind, int dimension, std::uint64_t side, double holding);

  GraphKind kind_;
  int dimension_;
  std::uint64_t side_;
  double holding_;
  std::uint64_t vertex_count_;
  std::vector<std::uint64_t> stride_;
};

/// Parses `torus:d=5,n=8`, `hypercube:n=12`, `complete:m=400`, `ring:n=64`,
/// each with an optional `,holding=p`.
GraphFamily parse_graph_spec(std::string_view spec);

enum class StopReason { HitSet, Killed, LengthCap };

struct WalkPath {
  std::vector<VertexId> vertices;
  std::uint64_t start_time = 0;
  StopReason stop_reason = StopReason::LengthCap;

  std::size_t last_index() const { return vertices.size() - 1; }
};

/// Stopping rule for `walk`. Exactly one of the forms is active.
struct StopRule {
  enum class Kind { GeometricKilling, HitSet, FixedLength };
  Kind kind = Kind::FixedLength;
  double mean = 0.0;                    // GeometricKilling: mean number of steps
  std::vector<std::uint8_t> targets;    // HitSet: membership flags indexed by VertexId
  std::uint64_t length = 0;             // FixedLength
  std::uint64_t cap = 0;                // optional safety cap for HitSet (0 = none)

  static StopRule killing(double mean);
  static StopRule hit(const GraphFamily& g, const std::vector<VertexId>& set);
  static StopRule fixed(std::uint64_t length);
};

WalkPath walk(const GraphFamily& g, VertexId start, const StopRule& stop, RandomStream& rng);

/// Sparse one-step transition matrix, row-stochastic.
Eigen::SparseMatrix<double, Eigen::RowMajor> transition_matrix(const GraphFamily& g);

/// Stationary distribution from the dense left null space of P - I.
Eigen::VectorXd stationary_distribution(const GraphFamily& g);

enum class MixingMethod { ClosedForm, DensePower, LumpedOrbit };

struct MixingTime {
  std::uint64_t tau = 0;
  MixingMethod method = MixingMethod::DensePower;
};

std::string to_string(MixingMethod m);

/// Smallest t with sup_x |p^t(x)/pi(x) - 1| <= 1/2.
///
/// Complete graphs use the closed form; other families up to `cap` vertices
/// iterate the exact distribution from vertex 0; tori and hypercubes above
/// the cap use the exact chain lumped onto symmetry orbits (coordinate
/// permutations and reflections, resp. Hamming weight), provided the orbit
/// count is itself within the cap.
MixingTime mixing_time(const GraphFamily& g, std::uint64_t cap = std::uint64_t{1} << 16);

/// sup_x sum_{t=0}^{horizon} (t+1) p^t(x), by exact distribution iteration.
double local_transience_sum(const GraphFamily& g, std::uint64_t horizon);

/// Exact p^t(0, .) as a dense vector (vertex-transitive: any start is a relabelling).
Eigen::VectorXd distribution_after(const GraphFamily& g, std::uint64_t t);

}  // namespace ustlab
