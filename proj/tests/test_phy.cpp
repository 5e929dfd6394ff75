#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pbmac/phy.hpp"

using namespace pbmac::phy;

namespace {

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log10(lo), std::log10(hi));
  return std::pow(10.0, u(rng));
}

}  // namespace

TEST(Phy, DecibelConversion) {
  EXPECT_NEAR(db_to_linear(10.0), 10.0, 1e-12);
  EXPECT_NEAR(db_to_linear(-3.0), 0.501187, 1e-6);
  EXPECT_NEAR(linear_to_db(100.0), 20.0, 1e-12);
  EXPECT_NEAR(linear_to_db(db_to_linear(7.3)), 7.3, 1e-12);
}

TEST(Phy, SinrExample) {
  EXPECT_NEAR(sinr(1e-9, 32.0, 1e-9, 1e-13), 32e-9 / (1e-9 + 1e-13), 1e-12);
  EXPECT_NEAR(sinr(1e-9, 32.0, 0.0, 1e-13), 320000.0, 1e-6);
}

TEST(Phy, MarginExample) {
  // 32e-9 / 10 - (1e-9 + 1e-13)
  EXPECT_NEAR(interference_margin(1e-9, 32.0, 1e-9, 1e-13, 10.0), 2.2e-9 - 1e-13, 1e-22);
  EXPECT_LT(interference_margin(1e-10, 32.0, 1e-9, 1e-13, 10.0), 0.0);
}

TEST(Phy, MarginSignMatchesSinr) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 10000; ++i) {
    const double d = log_uniform(rng, 1e-15, 1e-6);
    const double in = log_uniform(rng, 1e-15, 1e-6);
    const double g = log_uniform(rng, 1.0, 1000.0);
    const double gamma = log_uniform(rng, 0.1, 100.0);
    const double im = interference_margin(d, g, in, 1e-13, gamma);
    const double s = sinr(d, g, in, 1e-13);
    // Skip cases that sit on the threshold within rounding.
    if (std::abs(s / gamma - 1.0) < 1e-12) continue;
    EXPECT_EQ(im > 0.0, s > gamma) << "d=" << d << " in=" << in;
  }
}

TEST(Phy, PredictedIncrease) {
  EXPECT_NEAR(predict_interference_increase(1e-9, 0.01), 1e-7, 1e-20);
  // Exact for one prober.
  const double g = 3.7e-6, p = 0.1, a = 0.01;
  EXPECT_NEAR(predict_interference_increase(a * p * g, a) / (p * g), 1.0, 1e-12);
  // Two equal probers: each adds p*g, the estimate covers both.
  EXPECT_NEAR(predict_interference_increase(a * p * 2 * g, a) / (p * g), 2.0, 1e-12);
}

TEST(Phy, BlockingPowerExample) {
  PhyParams params;
  // max(2e-13 * 0.01 * 0.1 / 1e-9, 1e-13 * 0.1 / 1e-8) = max(2e-7, 1e-6)
  EXPECT_NEAR(blocking_power(1e-9, 1e-8, params), 1e-6, 1e-18);
  // max(2e-16 / 1e-12, 1e-14 / 1e-6) = max(2e-4, 1e-8)
  EXPECT_NEAR(blocking_power(1e-12, 1e-6, params), 2e-4, 1e-16);
}

TEST(Phy, BlockingPowerRejectsNonPositiveInputs) {
  PhyParams params;
  EXPECT_THROW(blocking_power(0.0, 1e-8, params), std::invalid_argument);
  EXPECT_THROW(blocking_power(1e-9, 0.0, params), std::invalid_argument);
  EXPECT_THROW(blocking_power(1e-9, -1e-9, params), std::invalid_argument);
}

TEST(Phy, ThresholdConventions) {
  EXPECT_TRUE(blocking_detected(1e-13, 1e-13));
  EXPECT_FALSE(blocking_detected(0.99e-13, 1e-13));
  // Increase equal to the margin does not block; strictly larger does.
  EXPECT_FALSE(would_block(1.0, 0.5, 2.0));
  EXPECT_TRUE(would_block(1.0000001, 0.5, 2.0));
  EXPECT_FALSE(would_block(0.0, 0.01, 1e-9));
}

TEST(Phy, SingleProberAlwaysReachesTwiceThreshold) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 10000; ++i) {
    PhyParams params;
    params.probe_fraction = log_uniform(rng, 1e-6, 1.0 - 1e-9);
    params.tx_power = log_uniform(rng, 1e-4, 1e2);
    params.blocking_threshold = log_uniform(rng, 1e-16, 1e-10);
    const double g = log_uniform(rng, 1e-12, 1e-6);
    const double im = log_uniform(rng, 1e-15, 1e-9);
    const double probe_rx = params.probe_power() * g;
    const double received = blocking_power(probe_rx, im, params) * g;
    ASSERT_GE(received, 2.0 * params.blocking_threshold * (1.0 - 1e-9)) << "case " << i;
  }
}

TEST(Phy, TwoProbersReachStrongerAlwaysAndWeakerWhenHarmful) {
  std::mt19937_64 rng(2);
  int harmful = 0;
  for (int i = 0; i < 10000; ++i) {
    PhyParams params;
    params.probe_fraction = log_uniform(rng, 1e-6, 1.0 - 1e-9);
    params.tx_power = log_uniform(rng, 1e-4, 1e2);
    params.blocking_threshold = log_uniform(rng, 1e-16, 1e-10);
    double g1 = log_uniform(rng, 1e-12, 1e-6);
    double g2 = log_uniform(rng, 1e-12, 1e-6);
    if (g1 < g2) std::swap(g1, g2);
    const double im = log_uniform(rng, 1e-16, 1e-6);
    const double probe_rx = params.probe_power() * (g1 + g2);
    const double bp = blocking_power(probe_rx, im, params);
    const double th = params.blocking_threshold * (1.0 - 1e-9);
    ASSERT_GE(bp * g1, th) << "case " << i;
    if (params.tx_power * g2 >= im) {
      ++harmful;
      ASSERT_GE(bp * g2, th) << "case " << i;
    }
  }
  EXPECT_GT(harmful, 1000);  // the conditional branch is actually exercised
}
