#include <gtest/gtest.h>

#include "pbmac/metrics.hpp"

using namespace pbmac;

TEST(ProbeHistogram, BucketsAndFractions) {
  ProbeHistogram h;
  for (int c : {1, 1, 1, 2}) h.record(c);
  EXPECT_EQ(h.total(), 4u);
  EXPECT_DOUBLE_EQ(h.fraction_one(), 0.75);
  EXPECT_DOUBLE_EQ(h.fraction_two(), 0.25);
  EXPECT_DOUBLE_EQ(h.fraction_three_plus(), 0.0);
  h.record(3);
  h.record(7);
  EXPECT_EQ(h.three_plus, 2u);
  EXPECT_DOUBLE_EQ(h.fraction_one() + h.fraction_two() + h.fraction_three_plus(), 1.0);
  EXPECT_THROW(h.record(0), std::invalid_argument);
}

TEST(ProbeHistogram, EmptyFractionsAreZero) {
  ProbeHistogram h;
  EXPECT_EQ(h.fraction_one(), 0.0);
  EXPECT_EQ(h.fraction_three_plus(), 0.0);
}

TEST(Finalize, Ratios) {
  MetricsRecord r;
  r.frames_generated = 20000;
  r.frames_delivered = 19990;
  r.frames_lost = 10;
  r.calls_started = 1000;
  r.calls_completed = 970;
  r.calls_dropped = 12;
  r.calls_blocked = 8;
  r.calls_in_progress = 10;
  r.probes.one = 99;
  r.probes.two = 1;
  const Summary s = finalize(r);
  EXPECT_DOUBLE_EQ(s.frame_loss_rate, 0.0005);
  EXPECT_DOUBLE_EQ(s.call_drop_rate, 0.012);
  EXPECT_DOUBLE_EQ(s.call_block_rate, 0.008);
  EXPECT_DOUBLE_EQ(s.p1, 0.99);
  EXPECT_DOUBLE_EQ(s.p2, 0.01);
  EXPECT_DOUBLE_EQ(s.p3plus, 0.0);
  EXPECT_FALSE(s.no_frames);
  EXPECT_TRUE(accounting_holds(r));
}

TEST(Finalize, EmptyRunFlagsZeroDenominators) {
  const Summary s = finalize(MetricsRecord{});
  EXPECT_TRUE(s.no_frames);
  EXPECT_TRUE(s.no_calls);
  EXPECT_EQ(s.frame_loss_rate, 0.0);
  EXPECT_EQ(s.call_drop_rate, 0.0);
}

TEST(Accounting, DetectsImbalance) {
  MetricsRecord r;
  r.frames_generated = 5;
  r.frames_delivered = 4;
  EXPECT_FALSE(accounting_holds(r));
  r.frames_lost = 1;
  EXPECT_TRUE(accounting_holds(r));
  r.calls_started = 2;
  r.calls_completed = 1;
  EXPECT_FALSE(accounting_holds(r));
  r.calls_in_progress = 1;
  EXPECT_TRUE(accounting_holds(r));
}
