#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ccd/error.hpp"
#include "ccd/stats.hpp"

namespace ccd::stats {
namespace {

TEST(Kolmogorov, SurvivalAtClassicCriticalValues) {
  EXPECT_NEAR(kolmogorov_survival(1.3581), 0.05, 1e-4);
  EXPECT_NEAR(kolmogorov_survival(1.94947460352040523), 0.001, 1e-6);
  EXPECT_EQ(kolmogorov_survival(0.0), 1.0);
}

TEST(KsTwoSample, IdenticalSamplesGiveZero) {
  std::vector<double> a{1, 2, 3, 4, 5};
  const auto r = ks_two_sample(a, a);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_FALSE(r.rejects(0.001));
}

TEST(KsTwoSample, DisjointSamplesGiveOne) {
  std::vector<double> a(200, 0.0);
  std::vector<double> b(200, 1.0);
  const auto r = ks_two_sample(a, b);
  EXPECT_EQ(r.statistic, 1.0);
  EXPECT_TRUE(r.rejects(0.001));
}

TEST(KsTwoSample, HandComputedStatistic) {
  // ECDF gaps after 1,2,3,4: 1/2, 0, 1/2, 0 -> D = 1/2.
  const auto r = ks_two_sample(std::vector<double>{1, 3}, std::vector<double>{2, 4});
  EXPECT_DOUBLE_EQ(r.statistic, 0.5);
}

TEST(KsTwoSample, TieToleranceMergesNearEqualValues) {
  std::vector<double> a{1.0, 2.0};
  std::vector<double> b{1.0 + 1e-13, 2.0 + 1e-13};
  EXPECT_DOUBLE_EQ(ks_two_sample(a, b).statistic, 0.5);
  EXPECT_DOUBLE_EQ(ks_two_sample(a, b, 1e-9).statistic, 0.0);
}

TEST(KsUniform, GridIsAccepted) {
  std::vector<double> u;
  for (int i = 0; i < 1000; ++i) u.push_back((i + 0.5) / 1000.0);
  const auto r = ks_uniform(u);
  EXPECT_NEAR(r.statistic, 0.0005, 1e-12);
  EXPECT_FALSE(r.rejects(0.001));
}

TEST(KsUniform, SkewedIsRejected) {
  std::vector<double> u;
  for (int i = 0; i < 1000; ++i) u.push_back(std::pow((i + 0.5) / 1000.0, 2));
  EXPECT_TRUE(ks_uniform(u).rejects(0.001));
}

TEST(Quantile, Type7) {
  std::vector<double> s{1, 2, 3, 4, 5};
  EXPECT_EQ(quantile_sorted(s, 0.0), 1.0);
  EXPECT_EQ(quantile_sorted(s, 0.5), 3.0);
  EXPECT_EQ(quantile_sorted(s, 1.0), 5.0);
  EXPECT_DOUBLE_EQ(quantile_sorted(s, 0.05), 1.2);
  EXPECT_THROW(quantile_sorted(std::vector<double>{}, 0.5), InputError);
}

TEST(Moments, MeanStderrAutocorrelation) {
  std::vector<double> x{1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(mean(x), 2.5);
  EXPECT_DOUBLE_EQ(standard_error(x), std::sqrt(5.0 / 3.0 / 4.0));
  std::vector<double> alt{1, -1, 1, -1, 1, -1};
  EXPECT_LT(lag1_autocorrelation(alt), -0.8);
}

}  // namespace
}  // namespace ccd::stats
