#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace ustlab {

/// Real-valued sample in which +infinity is a legitimate value (cross-component
/// forest distances). The finite part is kept sorted.
class EmpiricalSample {
 public:
  EmpiricalSample() = default;
  EmpiricalSample(std::vector<double> values, std::string label = {}, std::uint64_t seed = 0);

  const std::vector<double>& finite() const { return finite_; }
  std::size_t infinite_count() const { return infinite_; }
  std::size_t size() const { return finite_.size() + infinite_; }
  double infinite_fraction() const { return size() ? static_cast<double>(infinite_) / static_cast<double>(size()) : 0.0; }
  /// Median of the finite part, averaging the middle pair for even counts.
  double median() const;

  const std::string& label() const { return label_; }
  std::uint64_t seed() const { return seed_; }
  /// Scale the finite values were divided by (1 when unnormalised).
  double scale() const { return scale_; }

  EmpiricalSample scaled(double divisor) const;

 private:
  std::vector<double> finite_;
  std::size_t infinite_ = 0;
  std::string label_;
  std::uint64_t seed_ = 0;
  double scale_ = 1.0;
};

enum class StatisticKind { KS, TV, Chi2 };
std::string to_string(StatisticKind k);
StatisticKind statistic_from_string(const std::string& s);

struct ComparisonReport {
  StatisticKind kind = StatisticKind::KS;
  double value = 0.0;
  std::uint64_t n_a = 0;
  std::uint64_t n_b = 0;  // 0 for a reference distribution
  std::optional<double> threshold;
  bool pass = true;
  double inf_fraction_a = 0.0;
  double inf_fraction_b = 0.0;

  /// Sets `threshold` and `pass = value < threshold`.
  ComparisonReport& against(double limit);
};

void to_json(nlohmann::json& j, const ComparisonReport& r);
void from_json(const nlohmann::json& j, ComparisonReport& r);

class StatsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// sup_x |F_n(x) - F(x)| over the finite part; the infinite fraction is reported, not compared.
ComparisonReport ks_against(const EmpiricalSample& sample, const std::function<double(double)>& cdf);

/// Two-sample KS over finite parts.
ComparisonReport ks_two_sample(const EmpiricalSample& a, const EmpiricalSample& b);

/// TV between empirical pmfs on the union support; +infinity is one more atom.
ComparisonReport two_sample_tv(const EmpiricalSample& a, const EmpiricalSample& b);

/// TV between empirical laws of arbitrary ordered keys (e.g. distance tuples).
template <typename Key>
double empirical_tv(const std::vector<Key>& a, const std::vector<Key>& b) {
  if (a.empty() || b.empty()) throw StatsError("TV needs two nonempty samples");
  std::map<Key, std::pair<double, double>> mass;
  for (const Key& k : a) mass[k].first += 1.0;
  for (const Key& k : b) mass[k].second += 1.0;
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  double tv = 0.0;
  for (const auto& [k, m] : mass) tv += std::abs(m.first / na - m.second / nb);
  return 0.5 * tv;
}

/// Pearson chi-square of observed counts against expected probabilities;
/// cells with expected count below `min_expected` are pooled into one.
ComparisonReport chi2(const std::vector<double>& observed, const std::vector<double>& probabilities,
                      double min_expected = 5.0);

/// TV between an empirical integer pmf and a reference pmf on {0, 1, ...}.
double tv_against_pmf(const std::vector<std::uint64_t>& sample, const std::vector<double>& pmf);

/// Divides the finite values by `scale`; throws StatsError unless scale > 0.
EmpiricalSample normalize_by_scale(const EmpiricalSample& s, double scale);
/// Median mode: divides by median / target_median so the normalised median equals target_median.
EmpiricalSample normalize_by_median(const EmpiricalSample& s, double target_median = 1.0);

}  // namespace ustlab
