#include <gtest/gtest.h>
#include <omp.h>

#include <cmath>
#include <cstring>
#include <numeric>
#include <random>
#include <set>

#include "pbmac/channel.hpp"

using namespace pbmac;

namespace {

std::vector<std::size_t> all_pairs(const ChannelMatrix& c) {
  std::vector<std::size_t> p(c.pairs());
  std::iota(p.begin(), p.end(), std::size_t{0});
  return p;
}

bool bit_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

struct Series {
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<double> xs;

  double autocorr(std::size_t lag) const {
    double num = 0.0;
    for (std::size_t i = 0; i + lag < xs.size(); ++i) num += (xs[i] - mean) * (xs[i + lag] - mean);
    return num / static_cast<double>(xs.size() - lag) / (stddev * stddev);
  }
};

Series run_ar1(double eps, double sigma, std::size_t steps, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  ShadowState s{sigma * z(rng), eps, sigma};
  Series out;
  out.xs.reserve(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    s = step_shadowing(s, z(rng));
    out.xs.push_back(s.value_db);
  }
  out.mean = std::accumulate(out.xs.begin(), out.xs.end(), 0.0) / static_cast<double>(steps);
  double ss = 0.0;
  for (double x : out.xs) ss += (x - out.mean) * (x - out.mean);
  out.stddev = std::sqrt(ss / static_cast<double>(steps - 1));
  return out;
}

}  // namespace

TEST(PathLoss, ClampedAtShortRange) {
  EXPECT_EQ(path_loss(0.0, 2.4), 1.0);
  EXPECT_EQ(path_loss(0.5, 2.4), 1.0);
  EXPECT_EQ(path_loss(1.0, 2.4), 1.0);
}

TEST(PathLoss, PowerLawExamples) {
  EXPECT_NEAR(path_loss(10.0, 2.4), 0.003981071705534973, 1e-15);
  EXPECT_NEAR(path_loss(100.0, 2.0), 1e-4, 1e-18);
  EXPECT_NEAR(path_loss(150.0, 2.4) / std::exp(-2.4 * std::log(150.0)), 1.0, 1e-12);
}

TEST(PathLoss, MonotoneAndBounded) {
  double prev = 1.0;
  for (double d = 0.1; d < 2000.0; d *= 1.07) {
    const double g = path_loss(d, 2.4);
    EXPECT_LE(g, 1.0);
    EXPECT_LE(g, prev);
    prev = g;
  }
}

TEST(Shadowing, CorrelationFromSpeed) {
  EXPECT_EQ(shadow_correlation(0.0, 0.02, 20.0), 1.0);
  const double v = 20.0 / 3.6;
  EXPECT_NEAR(shadow_correlation(v, 0.02, 20.0), std::exp(-v * 0.02 / 20.0), 1e-15);
  EXPECT_NEAR(shadow_correlation(v, 0.02, 20.0), 0.994459, 1e-6);
  EXPECT_THROW(shadow_correlation(1.0, 0.02, 0.0), std::invalid_argument);
}

TEST(Shadowing, StepExample) {
  const ShadowState s = step_shadowing({2.0, 0.5, 4.0}, 1.0);
  EXPECT_NEAR(s.value_db, 1.0 + std::sqrt(0.75) * 4.0, 1e-12);
  EXPECT_EQ(s.epsilon, 0.5);
  EXPECT_EQ(s.sigma_db, 4.0);
}

TEST(Shadowing, UnitCorrelationFreezes) {
  ShadowState s{3.25, 1.0, 4.0};
  for (int i = 0; i < 100; ++i) s = step_shadowing(s, 2.5);
  EXPECT_EQ(s.value_db, 3.25);
}

TEST(Shadowing, Ar1StationaryStatistics) {
  for (double eps : {0.5, 0.9}) {
    const Series s = run_ar1(eps, 4.0, 100000, 11);
    EXPECT_NEAR(s.stddev / 4.0, 1.0, 0.03) << "eps=" << eps;
    for (std::size_t k = 1; k <= 5; ++k)
      EXPECT_NEAR(s.autocorr(k), std::pow(eps, static_cast<double>(k)), 0.02)
          << "eps=" << eps << " lag=" << k;
  }
}

TEST(Shadowing, Ar1StatisticsAtMobileCorrelation) {
  // Slowly decorrelating process: needs a longer series for the same spread.
  const double eps = shadow_correlation(20.0 / 3.6, 0.02, 20.0);
  const Series s = run_ar1(eps, 4.0, 1000000, 5);
  EXPECT_NEAR(s.stddev / 4.0, 1.0, 0.03);
  EXPECT_NEAR(s.autocorr(1), eps, 0.02);
}

TEST(ChannelMatrix, PairIndexIsPackedAndSymmetric) {
  ChannelMatrix c(7, 2.4);
  EXPECT_EQ(c.pairs(), 21u);
  std::set<std::size_t> seen;
  for (NodeId a = 0; a < 7; ++a) {
    for (NodeId b = a + 1; b < 7; ++b) {
      const auto p = c.pair_index(a, b);
      EXPECT_EQ(p, c.pair_index(b, a));
      EXPECT_LT(p, c.pairs());
      EXPECT_EQ(c.first(p), a);
      EXPECT_EQ(c.second(p), b);
      seen.insert(p);
    }
  }
  EXPECT_EQ(seen.size(), 21u);
}

TEST(ChannelMatrix, GainsMatchOracleAndAreReciprocal) {
  const std::size_t n = 12;
  ChannelMatrix c(n, 2.4);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  std::normal_distribution<double> z;
  std::vector<Position> pos(n);
  for (auto& p : pos) p = {u(rng), u(rng)};
  pos[5] = pos[4];  // co-located pair exercises the clamp
  for (auto& s : c.shadows()) s.value_db = 4.0 * z(rng);
  refresh_gains(pos, c);

  for (NodeId a = 0; a < n; ++a) {
    for (NodeId b = 0; b < n; ++b) {
      if (a == b) continue;
      EXPECT_TRUE(bit_equal(c.gain(a, b), c.gain(b, a)));
      const double d = std::hypot(pos[a].x - pos[b].x, pos[a].y - pos[b].y);
      const double pl = d <= 1.0 ? 1.0 : std::pow(d, -2.4);
      const double oracle = pl * std::pow(10.0, c.shadow(a, b).value_db / 10.0);
      EXPECT_NEAR(c.gain(a, b) / oracle, 1.0, 1e-12);
    }
  }
}

TEST(ChannelMatrix, SerialAndParallelKernelsAreBitIdentical) {
  const std::size_t n = 240;  // large enough to cross the parallel threshold
  ChannelMatrix a(n, 2.4);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  std::normal_distribution<double> z;
  std::vector<Position> pos(n);
  for (auto& p : pos) p = {u(rng), u(rng)};
  for (auto& s : a.shadows()) s = {4.0 * z(rng), 0.99, 4.0};
  ChannelMatrix b = a;

  std::vector<double> draws(a.pairs());
  const auto pairs = all_pairs(a);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(4);
  for (int step = 0; step < 5; ++step) {
    for (auto& d : draws) d = z(rng);
    advance_shadowing_serial(a, pairs, draws);
    advance_shadowing_parallel(b, pairs, draws);
    refresh_gains_serial(pos, a, pairs);
    refresh_gains_parallel(pos, b, pairs);
  }
  omp_set_num_threads(saved);

  for (std::size_t p = 0; p < a.pairs(); ++p) {
    ASSERT_TRUE(bit_equal(a.gains()[p], b.gains()[p])) << "pair " << p;
    ASSERT_TRUE(bit_equal(a.shadows()[p].value_db, b.shadows()[p].value_db)) << "pair " << p;
  }
}

TEST(ChannelMatrix, KernelsTouchOnlyListedPairs) {
  ChannelMatrix c(5, 2.4);
  std::vector<Position> pos{{0, 0}, {10, 0}, {20, 0}, {30, 0}, {40, 0}};
  refresh_gains(pos, c);
  const double untouched = c.gain(0, 4);
  for (auto& s : c.shadows()) s.epsilon = 0.0;
  const std::vector<std::size_t> subset{c.pair_index(0, 1)};
  const std::vector<double> draw{1.0};
  advance_shadowing_parallel(c, subset, draw);
  refresh_gains_parallel(pos, c, subset);
  EXPECT_EQ(c.gain(0, 4), untouched);
  EXPECT_NEAR(c.shadow(0, 1).value_db, 4.0, 1e-12);
  EXPECT_NEAR(c.gain(0, 1), std::pow(10.0, -2.4) * std::pow(10.0, 0.4), 1e-15);
}
