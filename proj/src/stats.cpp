#include "ustlab/stats.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

namespace ustlab {

EmpiricalSample::EmpiricalSample(std::vector<double> values, std::string label, std::uint64_t seed)
    : label_(std::move(label)), seed_(seed) {
  finite_.reserve(values.size());
  for (double v : values) {
    if (std::isnan(v)) throw StatsError("sample contains NaN");
    if (std::isinf(v)) {
      if (v < 0) throw StatsError("sample contains -infinity");
      ++infinite_;
    } else {
      finite_.push_back(v);
    }
  }
  std::sort(finite_.begin(), finite_.end());
}

double EmpiricalSample::median() const {
  if (finite_.empty()) throw StatsError("median of an empty finite part");
  const std::size_t n = finite_.size();
  return n % 2 ? finite_[n / 2] : 0.5 * (finite_[n / 2 - 1] + finite_[n / 2]);
}

EmpiricalSample EmpiricalSample::scaled(double divisor) const {
  EmpiricalSample out = *this;
  for (double& v : out.finite_) v /= divisor;
  out.scale_ = scale_ * divisor;
  return out;
}

std::string to_string(StatisticKind k) {
  switch (k) {
    case StatisticKind::KS: return "KS";
    case StatisticKind::TV: return "TV";
    case StatisticKind::Chi2: return "chi2";
  }
  return "?";
}

StatisticKind statistic_from_string(const std::string& s) {
  std::string low(s);
  std::transform(low.begin(), low.end(), low.begin(), [](unsigned char c) { return std::tolower(c); });
  if (low == "ks") return StatisticKind::KS;
  if (low == "tv") return StatisticKind::TV;
  if (low == "chi2") return StatisticKind::Chi2;
  throw StatsError("unknown statistic kind: " + s);
}

ComparisonReport& ComparisonReport::against(double limit) {
  threshold = limit;
  pass = value < limit;
  return *this;
}

void to_json(nlohmann::json& j, const ComparisonReport& r) {
  j = nlohmann::json{{"kind", to_string(r.kind)},
                     {"value", r.value},
                     {"n_a", r.n_a},
                     {"n_b", r.n_b},
                     {"threshold", r.threshold ? nlohmann::json(*r.threshold) : nlohmann::json(nullptr)},
                     {"pass", r.pass},
                     {"inf_fraction_a", r.inf_fraction_a},
                     {"inf_fraction_b", r.inf_fraction_b}};
}

void from_json(const nlohmann::json& j, ComparisonReport& r) {
  r.kind = statistic_from_string(j.at("kind").get<std::string>());
  r.value = j.at("value").get<double>();
  r.n_a = j.at("n_a").get<std::uint64_t>();
  r.n_b = j.at("n_b").get<std::uint64_t>();
  if (j.at("threshold").is_null())
    r.threshold.reset();
  else
    r.threshold = j.at("threshold").get<double>();
  r.pass = j.at("pass").get<bool>();
  r.inf_fraction_a = j.at("inf_fraction_a").get<double>();
  r.inf_fraction_b = j.at("inf_fraction_b").get<double>();
}

ComparisonReport ks_against(const EmpiricalSample& sample, const std::function<double(double)>& cdf) {
  const auto& x = sample.finite();
  if (x.empty()) throw StatsError("KS needs a nonempty finite part");
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size();) {
    std::size_t j = i;
    while (j < x.size() && x[j] == x[i]) ++j;
    const double f = cdf(x[i]);
    d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(static_cast<double>(j) / n - f)});
    i = j;
  }
  ComparisonReport r;
  r.kind = StatisticKind::KS;
  r.value = d;
  r.n_a = x.size();
  r.inf_fraction_a = sample.infinite_fraction();
  return r;
}

ComparisonReport ks_two_sample(const EmpiricalSample& a, const EmpiricalSample& b) {
  const auto& x = a.finite();
  const auto& y = b.finite();
  if (x.empty() || y.empty()) throw StatsError("KS needs nonempty finite parts");
  const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() || j < y.size()) {
    const double v = j == y.size() || (i < x.size() && x[i] <= y[j]) ? x[i] : y[j];
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  ComparisonReport r;
  r.kind = StatisticKind::KS;
  r.value = d;
  r.n_a = x.size();
  r.n_b = y.size();
  r.inf_fraction_a = a.infinite_fraction();
  r.inf_fraction_b = b.infinite_fraction();
  return r;
}

ComparisonReport two_sample_tv(const EmpiricalSample& a, const EmpiricalSample& b) {
  if (a.size() == 0 || b.size() == 0) throw StatsError("TV needs two nonempty samples");
  const auto& x = a.finite();
  const auto& y = b.finite();
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  double tv = std::abs(static_cast<double>(a.infinite_count()) / na - static_cast<double>(b.infinite_count()) / nb);
  std::size_t i = 0, j = 0;
  while (i < x.size() || j < y.size()) {
    const double v = j == y.size() || (i < x.size() && x[i] <= y[j]) ? x[i] : y[j];
    std::size_t ci = 0, cj = 0;
    while (i < x.size() && x[i] == v) ++i, ++ci;
    while (j < y.size() && y[j] == v) ++j, ++cj;
    tv += std::abs(static_cast<double>(ci) / na - static_cast<double>(cj) / nb);
  }
  ComparisonReport r;
  r.kind = StatisticKind::TV;
  r.value = std::min(1.0, 0.5 * tv);
  r.n_a = a.size();
  r.n_b = b.size();
  r.inf_fraction_a = a.infinite_fraction();
  r.inf_fraction_b = b.infinite_fraction();
  return r;
}

ComparisonReport chi2(const std::vector<double>& observed, const std::vector<double>& probabilities,
                      double min_expected) {
  if (observed.size() != probabilities.size() || observed.empty())
    throw StatsError("chi2 needs matching nonempty cell vectors");
  const double n = std::accumulate(observed.begin(), observed.end(), 0.0);
  if (!(n > 0)) throw StatsError("chi2 needs a positive total count");
  double stat = 0.0, pooled_o = 0.0, pooled_e = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = n * probabilities[i];
    if (e < min_expected) {
      pooled_o += observed[i];
      pooled_e += e;
      continue;
    }
    stat += (observed[i] - e) * (observed[i] - e) / e;
  }
  if (pooled_e > 0) stat += (pooled_o - pooled_e) * (pooled_o - pooled_e) / pooled_e;
  ComparisonReport r;
  r.kind = StatisticKind::Chi2;
  r.value = stat;
  r.n_a = static_cast<std::uint64_t>(n);
  return r;
}

double tv_against_pmf(const std::vector<std::uint64_t>& sample, const std::vector<double>& pmf) {
  if (sample.empty()) throw StatsError("TV needs a nonempty sample");
  std::map<std::uint64_t, double> freq;
  for (auto v : sample) freq[v] += 1.0;
  const double n = static_cast<double>(sample.size());
  double tv = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    auto it = freq.find(k);
    tv += std::abs((it == freq.end() ? 0.0 : it->second / n) - pmf[k]);
    if (it != freq.end()) freq.erase(it);
  }
  for (const auto& [k, c] : freq) tv += c / n;
  return 0.5 * tv;
}

EmpiricalSample normalize_by_scale(const EmpiricalSample& s, double scale) {
  if (!(scale > 0.0) || std::isinf(scale)) throw StatsError("normalisation scale must be positive and finite");
  return s.scaled(scale);
}

EmpiricalSample normalize_by_median(const EmpiricalSample& s, double target_median) {
  if (!(target_median > 0.0)) throw StatsError("target median must be positive");
  const double m = s.median();
  if (!(m > 0.0)) throw StatsError("median of the finite part must be positive");
  return s.scaled(m / target_median);
}

}  // namespace ustlab
