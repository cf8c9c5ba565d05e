#include <gtest/gtest.h>
#include <algorithm>

#include <cmath>

#include "ustlab/random.hpp"
#include "ustlab/stats.hpp"

using namespace ustlab;

namespace {
const double kInf = INFINITY;
double uniform_cdf(double x) { return std::clamp(x, 0.0, 1.0); }
}  // namespace

TEST(EmpiricalSample, SplitsInfinityAndSorts) {
  const EmpiricalSample s({3.0, kInf, 1.0, 2.0, kInf}, "x", 9);
  EXPECT_EQ(s.finite(), (std::vector<double>{1.0, 2.0, 3.0}));
  EXPECT_EQ(s.infinite_count(), 2u);
  EXPECT_EQ(s.size(), 5u);
  EXPECT_DOUBLE_EQ(s.infinite_fraction(), 0.4);
  EXPECT_DOUBLE_EQ(s.median(), 2.0);
  EXPECT_DOUBLE_EQ(EmpiricalSample({4.0, 1.0, 2.0, 3.0}).median(), 2.5);
  EXPECT_EQ(s.label(), "x");
  EXPECT_EQ(s.seed(), 9u);
}

TEST(Normalize, ByScaleAndMedian) {
  const EmpiricalSample s({2.0, 4.0, 6.0, kInf});
  const EmpiricalSample a = normalize_by_scale(s, 2.0);
  EXPECT_EQ(a.finite(), (std::vector<double>{1.0, 2.0, 3.0}));
  EXPECT_EQ(a.infinite_count(), 1u);
  EXPECT_DOUBLE_EQ(a.scale(), 2.0);
  const EmpiricalSample b = normalize_by_median(s, 1.5);
  EXPECT_DOUBLE_EQ(b.median(), 1.5);
  EXPECT_DOUBLE_EQ(b.scale(), 4.0 / 1.5);
  EXPECT_THROW(normalize_by_scale(s, 0.0), StatsError);
}

TEST(Ks, AgainstReference) {
  EXPECT_DOUBLE_EQ(ks_against(EmpiricalSample({0.5}), uniform_cdf).value, 0.5);
  EXPECT_DOUBLE_EQ(ks_against(EmpiricalSample({0.25, 0.75}), uniform_cdf).value, 0.25);
  const auto r = ks_against(EmpiricalSample({0.1, 0.2, kInf}), uniform_cdf);
  EXPECT_DOUBLE_EQ(r.inf_fraction_a, 1.0 / 3.0);
  EXPECT_EQ(r.n_a, 2u);  // finite values compared
  EXPECT_EQ(r.n_b, 0u);
  RandomStream rng(51);
  std::vector<double> u;
  for (int i = 0; i < 50000; ++i) u.push_back(rng.uniform());
  EXPECT_LT(ks_against(EmpiricalSample(u), uniform_cdf).value, 1.63 / std::sqrt(50000.0));
}

TEST(Ks, TwoSample) {
  const EmpiricalSample a({1, 2, 3, 4}), b({5, 6, 7});
  EXPECT_DOUBLE_EQ(ks_two_sample(a, a).value, 0.0);
  EXPECT_DOUBLE_EQ(ks_two_sample(a, b).value, 1.0);
  EXPECT_DOUBLE_EQ(ks_two_sample(EmpiricalSample({1, 2}), EmpiricalSample({2, 3})).value, 0.5);
  // Symmetric, and ties are handled as jumps of both ECDFs at once.
  const EmpiricalSample c({1, 1, 2, 5}), d({1, 3, 3, 4, 6});
  EXPECT_DOUBLE_EQ(ks_two_sample(c, d).value, ks_two_sample(d, c).value);
  EXPECT_DOUBLE_EQ(ks_two_sample(c, d).value, 0.55);
}

TEST(Tv, InfinityIsAnAtom) {
  EXPECT_DOUBLE_EQ(two_sample_tv(EmpiricalSample({1, kInf}), EmpiricalSample({1, 1})).value, 0.5);
  EXPECT_DOUBLE_EQ(two_sample_tv(EmpiricalSample({kInf}), EmpiricalSample({kInf, kInf})).value, 0.0);
  EXPECT_DOUBLE_EQ(two_sample_tv(EmpiricalSample({1, 2}), EmpiricalSample({3, 4})).value, 1.0);
  EXPECT_DOUBLE_EQ(tv_against_pmf({1, 1, 2, 2}, {0.0, 0.5, 0.5}), 0.0);
  EXPECT_DOUBLE_EQ(tv_against_pmf({0, 3}, {0.0, 0.5, 0.5}), 1.0);
  EXPECT_DOUBLE_EQ(empirical_tv(std::vector<int>{1, 2}, std::vector<int>{2, 2}), 0.5);
  EXPECT_THROW(empirical_tv(std::vector<int>{}, std::vector<int>{1}), StatsError);
}

TEST(Chi2, PerfectFitAndPooling) {
  EXPECT_NEAR(chi2({25, 25, 50}, {0.25, 0.25, 0.5}).value, 0.0, 1e-12);
  EXPECT_NEAR(chi2({30, 70}, {0.5, 0.5}).value, 16.0, 1e-12);
  // Cells 2 and 3 have expected counts 2 and 2, pooled into one cell with expected 4.
  EXPECT_NEAR(chi2({48, 50, 1, 1}, {0.48, 0.48, 0.02, 0.02}, 5.0).value,
              0.0 + 4.0 / 48.0 + 4.0 / 4.0, 1e-12);
}

TEST(Report, ThresholdAndJsonRoundTrip) {
  ComparisonReport r = ks_two_sample(EmpiricalSample({1, 2}), EmpiricalSample({2, 3}));
  EXPECT_FALSE(r.threshold.has_value());
  r.against(0.6);
  EXPECT_TRUE(r.pass);
  r.against(0.5);
  EXPECT_FALSE(r.pass);  // strict inequality
  nlohmann::json j = r;
  EXPECT_EQ(j["kind"], "KS");
  const ComparisonReport back = j.get<ComparisonReport>();
  EXPECT_EQ(back.kind, r.kind);
  EXPECT_EQ(back.value, r.value);
  EXPECT_EQ(back.threshold, r.threshold);
  EXPECT_EQ(back.pass, r.pass);
  EXPECT_EQ(back.n_a, 2u);
  EXPECT_EQ(statistic_from_string("tv"), StatisticKind::TV);
  EXPECT_EQ(statistic_from_string("KS"), StatisticKind::KS);
  EXPECT_EQ(to_string(StatisticKind::Chi2), "chi2");
  EXPECT_THROW(statistic_from_string("ad"), StatsError);
}
