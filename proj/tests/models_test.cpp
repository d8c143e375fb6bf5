#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ccd/error.hpp"
#include "ccd/models.hpp"
#include "ccd/rng.hpp"
#include "oracles.hpp"

namespace ccd {
namespace {

using testing::adaptive_integral;
using testing::oracle_cdf;

// Jump locations of the CAO betting function of a finite model.
std::vector<double> jump_points(const PrePostPair& pair) {
  std::vector<double> out;
  if (const auto table = pair.finite_table()) {
    for (std::size_t k = table->size() - 1; k >= 1; --k) out.push_back(table->tail(k));
  }
  return out;
}

std::vector<PrePostPair> gaussian_pairs() {
  return {PrePostPair::gauss_mean(0.2), PrePostPair::gauss_mean(-0.2), PrePostPair::gauss_mean(1.0),
          PrePostPair::gauss_mean(-1.0), PrePostPair::gauss_var(1.1),   PrePostPair::gauss_var(0.9)};
}

std::vector<PrePostPair> all_pairs() {
  auto pairs = gaussian_pairs();
  pairs.push_back(PrePostPair::bernoulli(0.5, 0.6));
  pairs.push_back(PrePostPair::bernoulli(0.1, 0.9));
  pairs.push_back(PrePostPair::bernoulli(0.7, 0.2));
  return pairs;
}

TEST(PrePostPair, RejectsInvalidParameters) {
  EXPECT_THROW(PrePostPair::bernoulli(0.5, 0.5), DomainError);
  EXPECT_THROW(PrePostPair::bernoulli(0.0, 0.5), DomainError);
  EXPECT_THROW(PrePostPair::bernoulli(0.5, 1.0), DomainError);
  EXPECT_THROW(PrePostPair::gauss_mean(0.0), DomainError);
  EXPECT_THROW(PrePostPair::gauss_var(1.0), DomainError);
  EXPECT_THROW(PrePostPair::gauss_var(-2.0), DomainError);
}

TEST(LogLikelihoodRatio, Examples) {
  EXPECT_DOUBLE_EQ(log_likelihood_ratio(PrePostPair::bernoulli(0.5, 0.6), 1.0), std::log(1.2));
  EXPECT_DOUBLE_EQ(log_likelihood_ratio(PrePostPair::bernoulli(0.5, 0.6), 0.0), std::log(0.8));
  EXPECT_NEAR(log_likelihood_ratio(PrePostPair::gauss_mean(0.2), 1.0), 0.18, 1e-15);
  EXPECT_NEAR(log_likelihood_ratio(PrePostPair::gauss_var(1.1), 0.0), -0.0953101798043248600, 1e-15);
}

TEST(LogLikelihoodRatio, AgreesWithDensityRatio) {
  for (const auto& pair : gaussian_pairs()) {
    for (double z = -4.0; z <= 4.0; z += 0.37) {
      EXPECT_NEAR(log_likelihood_ratio(pair, z), std::log(pair.density1(z) / pair.density0(z)), 1e-12);
    }
  }
}

TEST(LogLikelihoodRatio, BernoulliOutsideSupport) {
  EXPECT_THROW(log_likelihood_ratio(PrePostPair::bernoulli(0.5, 0.6), 2.0), DomainError);
  EXPECT_THROW(log_likelihood_ratio(PrePostPair::gauss_mean(0.2), INFINITY), DomainError);
}

TEST(CaoFinite, BernoulliTable) {
  const auto table = *PrePostPair::bernoulli(0.5, 0.6).finite_table();
  ASSERT_EQ(table.size(), 2U);
  const auto f = cao_finite(table);
  EXPECT_DOUBLE_EQ(f(0.3), 1.2);
  EXPECT_DOUBLE_EQ(f(0.5), 1.2);
  EXPECT_DOUBLE_EQ(f(0.7), 0.8);
}

TEST(CaoFinite, SingleLevelIsIdentity) {
  const auto f = cao_finite(FiniteLikelihoodTable({1.0}, {1.0}));
  for (double p : {0.0, 0.2, 0.5, 1.0}) EXPECT_EQ(f(p), 1.0);
}

TEST(CaoFinite, ThreeLevelTable) {
  // Suffix sums q_{k+1}+...+q_K = (0.75, 0.25, 0).
  const auto f = cao_finite(FiniteLikelihoodTable({0.5, 1.0, 2.0}, {0.25, 0.5, 0.25}));
  EXPECT_EQ(f(0.1), 2.0);
  EXPECT_EQ(f(0.25), 2.0);
  EXPECT_EQ(f(0.5), 1.0);
  EXPECT_EQ(f(0.75), 1.0);
  EXPECT_EQ(f(0.9), 0.5);
  EXPECT_EQ(f(0.0), 2.0);
  EXPECT_EQ(f(1.0), 0.5);
}

TEST(CaoFinite, DomainAndTableErrors) {
  const auto f = cao_finite(FiniteLikelihoodTable({0.8, 1.2}, {0.5, 0.5}));
  EXPECT_THROW(f(-0.01), DomainError);
  EXPECT_THROW(f(1.01), DomainError);
  EXPECT_THROW(FiniteLikelihoodTable({1.0, 2.0}, {0.5, 0.4}), DomainError);
  EXPECT_THROW(FiniteLikelihoodTable({1.0, 2.0}, {1.0, 0.0}), DomainError);
  EXPECT_THROW(FiniteLikelihoodTable({}, {}), DomainError);
}

TEST(CaoGaussMean, Examples) {
  EXPECT_NEAR(cao_gauss_mean(0.2, 0.5), 0.980198673306755302, 1e-15);
  EXPECT_NEAR(cao_gauss_mean(-0.2, 0.5), 0.980198673306755302, 1e-15);
  const double p = 1.0 - oracle_cdf(1.0);
  EXPECT_NEAR(cao_gauss_mean(0.2, p), 1.19721736312181016, 1e-9);
}

TEST(CaoGaussMean, EndpointsAreClampedAndFinite) {
  EXPECT_TRUE(std::isfinite(cao_gauss_mean(0.2, 0.0)));
  EXPECT_TRUE(std::isfinite(cao_gauss_mean(0.2, 1.0)));
  EXPECT_GT(cao_gauss_mean(0.2, 0.0), 0.0);
  EXPECT_GT(cao_gauss_mean(0.2, 1.0), 0.0);
  EXPECT_EQ(cao_gauss_mean(0.2, 0.0), cao_gauss_mean(0.2, kBettingClamp));
}

TEST(CaoGaussVar, Examples) {
  EXPECT_NEAR(cao_gauss_var(1.1, 1.0), 1.0 / 1.1, 1e-12);
  EXPECT_NEAR(cao_gauss_var(0.9, 0.0), 1.0 / 0.9, 1e-12);
  // p = 2 Phi(-1) puts Phi^{-1}(p/2) at -1; value from mpmath.
  EXPECT_NEAR(cao_gauss_var(1.1, 2.0 * oracle_cdf(-1.0)), 0.991502985135449663, 1e-9);
}

TEST(CaoGaussVar, RangeMatchesSideOfOne) {
  for (double p = 0.01; p < 1.0; p += 0.01) {
    EXPECT_GE(cao_gauss_var(1.1, p), 1.0 / 1.1 - 1e-15);
    EXPECT_LE(cao_gauss_var(0.9, p), 1.0 / 0.9 + 1e-15);
  }
}

TEST(RocCurve, Endpoints) {
  for (const auto& pair : all_pairs()) {
    EXPECT_EQ(roc_curve(pair, 0.0), 0.0) << pair.name();
    EXPECT_EQ(roc_curve(pair, 1.0), 1.0) << pair.name();
  }
}

TEST(RocCurve, Examples) {
  EXPECT_NEAR(roc_curve(PrePostPair::gauss_mean(0.2), 0.5), 0.579259709439103023, 1e-12);
  EXPECT_NEAR(roc_curve(PrePostPair::gauss_var(1.1), 2.0 * oracle_cdf(-1.0)), 0.363302140886897855, 1e-12);
  // Bernoulli(0.5 -> 0.6): slope 1.2 up to p = 0.5, reaching power 0.6.
  EXPECT_NEAR(roc_curve(PrePostPair::bernoulli(0.5, 0.6), 0.5), 0.6, 1e-15);
  EXPECT_NEAR(roc_curve(PrePostPair::bernoulli(0.5, 0.6), 0.75), 0.8, 1e-15);
}

TEST(BettingFunctionProperty, SurvivalFormMatchesRocDerivativeForm) {
  for (const auto& pair : gaussian_pairs()) {
    const auto f = BettingFunction::cao(pair);
    for (int i = 1; i <= 99; ++i) {
      const double p = 0.01 * i;
      ASSERT_NEAR(f(p), roc_derivative(pair, p), 1e-10) << pair.name() << " p=" << p;
    }
  }
}

TEST(BettingFunctionProperty, EqualsRocFiniteDifference) {
  constexpr double h = 1e-6;
  for (const auto& pair : all_pairs()) {
    const auto f = BettingFunction::cao(pair);
    for (int i = 1; i <= 19; ++i) {
      const double p = 0.05 * i;
      // Skip the ROC kinks of finite pairs, where the derivative does not exist.
      if (pair.kind() == PrePostPair::Kind::bernoulli) {
        const auto t = *pair.finite_table();
        if (std::abs(p - t.tail(1)) < 2 * h) continue;
      }
      const double fd = (roc_curve(pair, p + h) - roc_curve(pair, p - h)) / (2 * h);
      ASSERT_NEAR(fd, f(p), 1e-4) << pair.name() << " p=" << p;
    }
  }
}

TEST(BettingFunctionProperty, IntegratesToOne) {
  for (const auto& pair : all_pairs()) {
    const auto f = BettingFunction::cao(pair);
    EXPECT_NEAR(adaptive_integral([&](double p) { return f(p); }, 0.0, 1.0, jump_points(pair)), 1.0, 1e-6) << pair.name();
  }
}

TEST(BettingFunctionProperty, NonIncreasing) {
  for (const auto& pair : all_pairs()) {
    const auto f = BettingFunction::cao(pair);
    double prev = f(0.0);
    for (int i = 1; i <= 10000; ++i) {
      const double cur = f(i / 10000.0);
      ASSERT_LE(cur, prev) << pair.name() << " at i=" << i;
      prev = cur;
    }
  }
}

// Q0(L > f(p)) <= p <= Q0(L >= f(p)), estimated with 10^6 pre-change draws.
TEST(BettingFunctionProperty, SurvivalSandwich) {
  constexpr int draws = 1'000'000;
  for (const auto& pair : all_pairs()) {
    const auto f = BettingFunction::cao(pair);
    CounterRng rng(7, 0, StreamRole::observations);
    std::vector<double> log_l(draws);
    for (auto& v : log_l) {
      const double z = pair.kind() == PrePostPair::Kind::bernoulli ? rng.bernoulli(pair.theta0()) : rng.normal();
      v = log_likelihood_ratio(pair, z);
    }
    for (double p : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const double log_t = std::log(f(p));
      double gt = 0.0;
      double ge = 0.0;
      for (double v : log_l) {
        gt += v > log_t;
        ge += v >= log_t;
      }
      gt /= draws;
      ge /= draws;
      const double se = std::sqrt(p * (1 - p) / draws);
      EXPECT_LE(gt, p + 3 * se) << pair.name() << " p=" << p;
      EXPECT_LE(p, ge + 3 * se) << pair.name() << " p=" << p;
    }
  }
}

TEST(BettingFunctionProperty, MeanUnderUniformIsOne) {
  for (const auto& pair : all_pairs()) {
    const auto f = BettingFunction::cao(pair);
    CounterRng rng(11, 0, StreamRole::tau);
    double sum = 0.0;
    constexpr int draws = 1'000'000;
    for (int i = 0; i < draws; ++i) sum += f(rng.uniform());
    EXPECT_NEAR(sum / draws, 1.0, 0.005) << pair.name();
  }
}

TEST(CaoFromSamples, DegenerateLaw) {
  const auto f = cao_from_samples(std::vector<double>(1000, 1.0));
  for (double p : {0.0, 0.3, 1.0}) EXPECT_EQ(f(p), 1.0);
}

TEST(CaoFromSamples, TwoLevelSampleReproducesFiniteCao) {
  std::vector<double> samples(500, 0.8);
  samples.insert(samples.end(), 500, 1.2);
  const auto f = cao_from_samples(samples);
  const auto g = cao_finite(FiniteLikelihoodTable({0.8, 1.2}, {0.5, 0.5}));
  EXPECT_EQ(f(0.3), 1.2);
  EXPECT_EQ(f(0.7), 0.8);
  for (int i = 0; i <= 1000; ++i) ASSERT_EQ(f(i / 1000.0), g(i / 1000.0)) << i;
}

TEST(CaoFromSamples, ConvergesToGaussMeanClosedForm) {
  CounterRng rng(3, 0, StreamRole::observations);
  std::vector<double> samples(1'000'000);
  for (auto& s : samples) s = std::exp(0.2 * rng.normal() - 0.02);
  const auto f = cao_from_samples(std::move(samples));
  double worst = 0.0;
  for (double p = 0.05; p <= 0.95 + 1e-12; p += 0.005) worst = std::max(worst, std::abs(f(p) - cao_gauss_mean(0.2, p)));
  EXPECT_LT(worst, 0.02);
}

TEST(CaoFromSamples, Errors) {
  EXPECT_THROW(cao_from_samples({}), InputError);
  EXPECT_THROW(cao_from_samples({1.0, -1.0}), InputError);
}

TEST(BettingFunction, Names) {
  EXPECT_EQ(BettingFunction::cao(PrePostPair::bernoulli(0.5, 0.6)).name(), "finite-CAO");
  EXPECT_EQ(BettingFunction::cao(PrePostPair::gauss_mean(0.2)).name(), "gauss-mean-CAO");
  EXPECT_EQ(BettingFunction::cao(PrePostPair::gauss_var(1.1)).name(), "gauss-var-CAO");
  EXPECT_EQ(cao_from_samples({1.0}).name(), "empirical-CAO");
}

TEST(PrePostPair, KlDivergences) {
  const auto pair = PrePostPair::bernoulli(0.5, 0.6);
  EXPECT_NEAR(pair.kl_pre_post(), 0.0204109972601275648, 1e-15);
  EXPECT_NEAR(pair.kl_post_pre(), 0.0201355135506888734, 1e-15);
  EXPECT_NEAR(PrePostPair::gauss_mean(0.2).kl_pre_post(), 0.02, 1e-15);
}

}  // namespace
}  // namespace ccd
