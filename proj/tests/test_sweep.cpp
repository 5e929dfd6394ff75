#include <gtest/gtest.h>
#include <omp.h>

#include <json.hpp>

#include <cmath>

#include "pbmac/sweep.hpp"

using namespace pbmac;

namespace {

SimConfig small() {
  SimConfig c;
  c.total_frames = 1500;
  c.seed = 3;
  return c;
}

}  // namespace

TEST(Sweep, RowOrderAndSeeds) {
  const SweepGrid grid{{20, 40}, {0.0, 10.0}, 2};
  const auto rows = sweep_serial(small(), grid);
  ASSERT_EQ(rows.size(), 8u);
  EXPECT_EQ(rows[0].nodes, 20);
  EXPECT_EQ(rows[0].v_kph, 0.0);
  EXPECT_EQ(rows[0].seed, 3u);
  EXPECT_EQ(rows[1].seed, 4u);
  EXPECT_EQ(rows[2].v_kph, 10.0);
  EXPECT_EQ(rows[7].nodes, 40);
  for (const auto& r : rows) EXPECT_TRUE(r.error.empty());
}

TEST(Sweep, ParallelMatchesSerial) {
  const SweepGrid grid{{20, 40}, {0.0, 20.0}, 2};
  const int saved = omp_get_max_threads();
  omp_set_num_threads(3);
  const auto par = sweep_parallel(small(), grid);
  omp_set_num_threads(saved);
  const auto ser = sweep_serial(small(), grid);
  ASSERT_EQ(par.size(), ser.size());
  for (std::size_t i = 0; i < ser.size(); ++i) {
    EXPECT_EQ(par[i].record, ser[i].record) << "row " << i;
    EXPECT_EQ(json_record(par[i]), json_record(ser[i]));
  }
}

TEST(Sweep, InvalidCellReportsError) {
  const SweepGrid grid{{21}, {10.0}, 1};
  const auto rows = sweep_serial(small(), grid);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_FALSE(rows[0].error.empty());
  const auto j = nlohmann::json::parse(json_record(rows[0]));
  EXPECT_TRUE(j.contains("error"));
  EXPECT_THROW(sweep_serial(small(), SweepGrid{{20}, {0.0}, 0}), ConfigError);
}

TEST(Sweep, SummaryMeanAndSampleStd) {
  std::vector<RunRow> rows(3);
  for (auto& r : rows) {
    r.nodes = 20;
    r.v_kph = 10.0;
  }
  rows[0].summary.frame_loss_rate = 1.0;
  rows[1].summary.frame_loss_rate = 2.0;
  rows[2].summary.frame_loss_rate = 4.0;
  RunRow other;
  other.nodes = 40;
  other.v_kph = 10.0;
  other.summary.call_drop_rate = 0.5;
  rows.push_back(other);

  const auto cells = summarize(rows);
  ASSERT_EQ(cells.size(), 2u);
  EXPECT_EQ(cells[0].runs, 3);
  EXPECT_DOUBLE_EQ(cells[0].frame_loss_rate.mean, 7.0 / 3.0);
  EXPECT_NEAR(cells[0].frame_loss_rate.std, std::sqrt(7.0 / 3.0), 1e-12);
  EXPECT_EQ(cells[1].runs, 1);
  EXPECT_EQ(cells[1].call_drop_rate.mean, 0.5);
  EXPECT_EQ(cells[1].call_drop_rate.std, 0.0);
}

TEST(Output, CsvColumnsAndRecordSchema) {
  EXPECT_EQ(csv_header(), "N,v_kph,seed,frame_loss_rate,call_drop_rate,call_block_rate,p1,p2,p3plus");
  RunRow r;
  r.nodes = 20;
  r.v_kph = 10.0;
  r.seed = 7;
  r.summary.frame_loss_rate = 0.0005;
  r.summary.p1 = 1.0;
  EXPECT_EQ(csv_row(r), "20,10,7,0.0005,0,0,1,0,0");

  const auto j = nlohmann::json::parse(json_record(r));
  EXPECT_EQ(j["schema_version"], kSchemaVersion);
  EXPECT_EQ(j["N"], 20);
  EXPECT_EQ(j["seed"], 7);
  EXPECT_DOUBLE_EQ(j["frame_loss_rate"].get<double>(), 0.0005);
  EXPECT_TRUE(j["counts"].contains("half_duplex_violations"));

  const auto s = summary_csv({CellSummary{}});
  EXPECT_EQ(s.substr(0, s.find('\n')).find("N,v_kph,runs,frame_loss_rate_mean"), 0u);
}
