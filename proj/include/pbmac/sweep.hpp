#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pbmac/config.hpp"
#include "pbmac/metrics.hpp"

namespace pbmac {

inline constexpr int kSchemaVersion = 1;

struct SweepGrid {
  std::vector<int> nodes;
  std::vector<double> velocities_kph;
  int replications = 1;
};

struct RunRow {
  int nodes = 0;
  double v_kph = 0.0;
  std::uint64_t seed = 0;
  Summary summary;
  MetricsRecord record;
  std::string error;  // non-empty when the run could not be configured
};

struct MetricStats {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for one replication
};

struct CellSummary {
  int nodes = 0;
  double v_kph = 0.0;
  int runs = 0;
  MetricStats frame_loss_rate;
  MetricStats call_drop_rate;
  MetricStats call_block_rate;
  MetricStats p1;
  MetricStats p2;
  MetricStats p3plus;
};

/// Rows ordered by (N, v, replication). Replication r uses base.seed + r.
std::vector<RunRow> sweep_serial(const SimConfig& base, const SweepGrid& grid);

/// Same rows as sweep_serial, with runs spread over OpenMP threads.
std::vector<RunRow> sweep_parallel(const SimConfig& base, const SweepGrid& grid);

/// One entry per (N, v) cell, in grid order.
std::vector<CellSummary> summarize(const std::vector<RunRow>& rows);

RunRow run_one(const SimConfig& config);

std::string csv_header();
std::string csv_row(const RunRow& row);
std::string json_record(const RunRow& row);
std::string summary_csv(const std::vector<CellSummary>& cells);

void write_csv(const std::vector<RunRow>& rows, const std::filesystem::path& path);
void write_records(const std::vector<RunRow>& rows, const std::filesystem::path& path);
void write_summary(const std::vector<CellSummary>& cells, const std::filesystem::path& path);

}  // namespace pbmac
