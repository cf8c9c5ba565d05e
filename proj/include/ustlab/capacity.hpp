#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ustlab/extension.hpp"
#include "ustlab/graph.hpp"
#include "ustlab/lerw.hpp"

namespace ustlab {

/// Monte Carlo mean with a 95% normal half-width.
struct EstimateWithCI {
  double value = 0.0;
  double half_width = 0.0;
  std::uint64_t n_samples = 0;
  std::string estimator_id;

  double lo() const { return value - half_width; }
  double hi() const { return value + half_width; }
  static EstimateWithCI exact(double v, std::string id) { return {v, 0.0, 0, std::move(id)}; }
  static EstimateWithCI from_samples(std::span<const double> xs, std::string id);
};

/// Largest graph handled by the exact capacity routines.
inline constexpr std::uint64_t kExactCapacityLimit = std::uint64_t{1} << 12;

/// P_pi[T_S < r] by propagating the walk killed on S for r - 1 steps.
double cap_r_exact(const GraphFamily& g, std::span<const VertexId> S, std::uint64_t r);
/// P_pi[T_U < r, T_V < r] = Cap(U) + Cap(V) - Cap(U u V).
double closeness_exact(const GraphFamily& g, std::span<const VertexId> U, std::span<const VertexId> V,
                       std::uint64_t r);

/// Stationary probes: X_0 uniform, r - 1 further steps, hit indicator.
EstimateWithCI cap_r(const GraphFamily& g, std::span<const VertexId> S, std::uint64_t r, RandomStream& rng,
                     std::uint64_t n_samples);
EstimateWithCI closeness(const GraphFamily& g, std::span<const VertexId> U, std::span<const VertexId> V,
                         std::uint64_t r, RandomStream& rng, std::uint64_t n_samples);

/// One outer replicate of the constants estimator.
struct SegmentSample {
  std::size_t length = 0;        // |LE_s(A_1)|
  std::size_t distinct = 0;      // distinct vertices in LE_s(A_1)
  double capacity = 0.0;         // Cap_r of LE_s(A_1), exact or inner estimate
  double capacity_half_width = 0.0;
};

struct ConstantsReport {
  EstimateWithCI alpha;
  EstimateWithCI gamma;
  std::uint64_t m = 0;  // ceil(|G| / (alpha r^2))
  ScaleSet scales;
  std::uint64_t vertex_count = 0;
  std::vector<SegmentSample> samples;

  /// gamma / sqrt(alpha), with a first-order propagated half-width.
  EstimateWithCI beta() const;
};

/// gamma = E|LE_s(A_1)| / r and alpha = E Cap_r[LE_s(A_1)] |G| / r^2 from
/// stationary walks of length r. Capacities are exact when n_inner == 0 and
/// the graph is small enough, otherwise estimated with n_inner probes each.
/// Throws ScaleError when A_1 is empty (r <= 3s).
ConstantsReport estimate_constants(const GraphFamily& g, const ScaleSet& scales, RandomStream& rng,
                                   std::uint64_t n_outer, std::uint64_t n_inner, unsigned threads = 1);

/// Whole-lattice limits in Z^d from walks truncated at `trunc` steps. The
/// same walks truncated at trunc / 2 give the stability values.
struct LatticeLimits {
  int dimension = 0;
  std::uint64_t trunc = 0;
  EstimateWithCI gamma;
  EstimateWithCI alpha;
  EstimateWithCI gamma_half;
  EstimateWithCI alpha_half;
};

/// gamma_inf = P[LE(Y) misses Z_1..], alpha_inf additionally asks W_1.. to miss
/// LE(Y) u LE(Z_1..). Non-lazy simple random walks from the origin. d >= 5.
LatticeLimits lattice_limit_constants(int d, std::uint64_t trunc, RandomStream& rng, std::uint64_t n_samples,
                                      unsigned threads = 1);

/// E #{(t, u) in [0, q]^2 : X_t == Y_u} for independent lazy walks on the
/// n-cube with distinct uniform starts.
EstimateWithCI hypercube_intersection(int n, std::uint64_t q, RandomStream& rng, std::uint64_t n_samples,
                                      double holding = 0.5, unsigned threads = 1);
/// The same expectation computed from the Hamming-weight chain of X_t xor Y_u.
double hypercube_intersection_exact(int n, std::uint64_t q, double holding = 0.5);

/// q = floor((tau |G|^{1/2})^{1/2}).
std::uint64_t hypercube_horizon(std::uint64_t tau, std::uint64_t vertex_count);

}  // namespace ustlab
