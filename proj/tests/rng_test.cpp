#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "ccd/rng.hpp"

namespace ccd {
namespace {

// Known-answer vectors from the Random123 distribution.
TEST(Philox, KnownAnswers) {
  using A4 = std::array<std::uint32_t, 4>;
  EXPECT_EQ(philox4x32_10({0, 0, 0, 0}, {0, 0}), (A4{0x6627e8d5U, 0xe169c58dU, 0xbc57ac4cU, 0x9b00dbd8U}));
  EXPECT_EQ(philox4x32_10({0xffffffffU, 0xffffffffU, 0xffffffffU, 0xffffffffU}, {0xffffffffU, 0xffffffffU}),
            (A4{0x408f276dU, 0x41c83b0eU, 0xa20bc7c6U, 0x6d5451fdU}));
  EXPECT_EQ(philox4x32_10({0x243f6a88U, 0x85a308d3U, 0x13198a2eU, 0x03707344U}, {0xa4093822U, 0x299f31d0U}),
            (A4{0xd16cfe09U, 0x94fdccebU, 0x5001e420U, 0x24126ea1U}));
}

TEST(CounterRng, Deterministic) {
  CounterRng a(42, 3, StreamRole::tau);
  CounterRng b(42, 3, StreamRole::tau);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(CounterRng, StreamsAreDistinct) {
  std::set<std::uint64_t> firsts;
  for (std::uint64_t run = 0; run < 50; ++run) {
    for (auto role : {StreamRole::observations, StreamRole::tau, StreamRole::chernoff}) {
      for (std::uint64_t seed : {1ULL, 2ULL}) firsts.insert(CounterRng(seed, run, role)());
    }
  }
  EXPECT_EQ(firsts.size(), 300U);
}

TEST(CounterRng, UniformMomentsAndRange) {
  CounterRng rng(1, 0, StreamRole::observations);
  double sum = 0.0;
  double sum_sq = 0.0;
  constexpr int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sum_sq += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 6 * std::sqrt(1.0 / 12 / n));
  EXPECT_NEAR(sum_sq / n, 1.0 / 3, 0.005);
}

TEST(CounterRng, NormalMoments) {
  CounterRng rng(2, 0, StreamRole::observations);
  double sum = 0.0;
  double sum_sq = 0.0;
  constexpr int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sum_sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 6 / std::sqrt(n));
  EXPECT_NEAR(sum_sq / n, 1.0, 6 * std::sqrt(2.0 / n));
}

}  // namespace
}  // namespace ccd
