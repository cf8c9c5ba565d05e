#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "ustlab/random.hpp"

namespace ustlab {

/// s_1 < ... < s_{k-1}: arrivals of the Poisson process with rate t, via
/// s_j = sqrt(2 (E_1 + ... + E_j)).
std::vector<double> poisson_arrivals(int k, RandomStream& rng);

/// Line-breaking tree on the ends y_1..y_k. Segment j (j >= 1) joins end
/// y_{j+1} to a point chosen uniformly on the tree built so far; segment 0 is
/// the initial [y_1, y_2].
struct LineBreakTree {
  std::vector<double> arrivals;      // s_1..s_{k-1}
  std::vector<double> attach_at;     // arc-length coordinate of each attachment, in [0, s_{j-1})
  std::vector<double> lengths;       // segment lengths; lengths[0] = s_1
  Eigen::MatrixXd distances;         // over the ends

  double total_length() const { return arrivals.empty() ? 0.0 : arrivals.back(); }
};

/// Builds the tree; arc length is laid out segment by segment in insertion order.
LineBreakTree line_break(int k, RandomStream& rng);

/// Pairwise distances among y_1..y_k: a draw from F_k.
Eigen::MatrixXd sample_Fk(int k, RandomStream& rng);

/// Independent F_k sampler that tracks the tree as an explicit weighted graph
/// and finds distances by path search; used to cross-check `sample_Fk`.
Eigen::MatrixXd sample_Fk_graph(int k, RandomStream& rng);

/// Rayleigh law: P[X > x] = exp(-x^2 / 2).
inline double rayleigh_cdf(double x) { return x <= 0.0 ? 0.0 : -std::expm1(-0.5 * x * x); }
inline double rayleigh_median() { return std::sqrt(2.0 * std::log(2.0)); }

/// Four-point condition d(a,b)+d(c,d) <= max(d(a,c)+d(b,d), d(a,d)+d(b,c)) for all
/// quadruples, plus symmetry, zero diagonal and the triangle inequality.
template <typename Derived>
bool is_tree_metric(const Eigen::MatrixBase<Derived>& D, double tol = 1e-9) {
  const Eigen::Index n = D.rows();
  if (D.cols() != n) return false;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(D(i, i)) > tol) return false;
    for (Eigen::Index j = 0; j < n; ++j)
      if (std::abs(D(i, j) - D(j, i)) > tol || D(i, j) < -tol) return false;
  }
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      for (Eigen::Index c = 0; c < n; ++c) {
        if (D(a, c) > D(a, b) + D(b, c) + tol) return false;
        for (Eigen::Index d = 0; d < n; ++d) {
          const double s1 = D(a, b) + D(c, d);
          const double s2 = D(a, c) + D(b, d);
          const double s3 = D(a, d) + D(b, c);
          if (s1 > std::max(s2, s3) + tol) return false;
        }
      }
  return true;
}

}  // namespace ustlab
