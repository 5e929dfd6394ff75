#include "pbmac/sweep.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "pbmac/engine.hpp"

namespace pbmac {

namespace {

struct Job {
  int nodes;
  double v_kph;
  std::uint64_t seed;
};

std::vector<Job> jobs(const SimConfig& base, const SweepGrid& grid) {
  if (grid.replications < 1) throw ConfigError("replications must be >= 1");
  std::vector<Job> out;
  for (int n : grid.nodes)
    for (double v : grid.velocities_kph)
      for (int r = 0; r < grid.replications; ++r)
        out.push_back({n, v, base.seed + static_cast<std::uint64_t>(r)});
  return out;
}

RunRow run_job(const SimConfig& base, const Job& job) {
  SimConfig c = base;
  c.nodes = job.nodes;
  c.velocity_kph = job.v_kph;
  c.seed = job.seed;
  RunRow row = run_one(c);
  row.nodes = job.nodes;
  row.v_kph = job.v_kph;
  row.seed = job.seed;
  return row;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

MetricStats stats(const std::vector<double>& xs) {
  MetricStats s;
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return s;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

RunRow run_one(const SimConfig& config) {
  RunRow row;
  row.nodes = config.nodes;
  row.v_kph = config.velocity_kph;
  row.seed = config.seed;
  try {
    row.record = Simulator(config).run();
    row.summary = finalize(row.record);
  } catch (const ConfigError& e) {
    row.error = e.what();
  }
  return row;
}

std::vector<RunRow> sweep_serial(const SimConfig& base, const SweepGrid& grid) {
  const auto js = jobs(base, grid);
  std::vector<RunRow> rows;
  rows.reserve(js.size());
  for (const auto& j : js) rows.push_back(run_job(base, j));
  return rows;
}

std::vector<RunRow> sweep_parallel(const SimConfig& base, const SweepGrid& grid) {
  const auto js = jobs(base, grid);
  std::vector<RunRow> rows(js.size());
  const auto count = static_cast<std::ptrdiff_t>(js.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) rows[i] = run_job(base, js[i]);
  return rows;
}

std::vector<CellSummary> summarize(const std::vector<RunRow>& rows) {
  std::vector<CellSummary> cells;
  std::size_t i = 0;
  while (i < rows.size()) {
    std::size_t j = i;
    std::vector<double> fl, cd, cb, a, b, c;
    while (j < rows.size() && rows[j].nodes == rows[i].nodes && rows[j].v_kph == rows[i].v_kph) {
      if (rows[j].error.empty()) {
        const Summary& s = rows[j].summary;
        fl.push_back(s.frame_loss_rate);
        cd.push_back(s.call_drop_rate);
        cb.push_back(s.call_block_rate);
        a.push_back(s.p1);
        b.push_back(s.p2);
        c.push_back(s.p3plus);
      }
      ++j;
    }
    CellSummary cell;
    cell.nodes = rows[i].nodes;
    cell.v_kph = rows[i].v_kph;
    cell.runs = static_cast<int>(fl.size());
    cell.frame_loss_rate = stats(fl);
    cell.call_drop_rate = stats(cd);
    cell.call_block_rate = stats(cb);
    cell.p1 = stats(a);
    cell.p2 = stats(b);
    cell.p3plus = stats(c);
    cells.push_back(cell);
    i = j;
  }
  return cells;
}

std::string csv_header() {
  return "N,v_kph,seed,frame_loss_rate,call_drop_rate,call_block_rate,p1,p2,p3plus";
}

std::string csv_row(const RunRow& r) {
  const Summary& s = r.summary;
  return std::to_string(r.nodes) + ',' + num(r.v_kph) + ',' + std::to_string(r.seed) + ',' +
         num(s.frame_loss_rate) + ',' + num(s.call_drop_rate) + ',' + num(s.call_block_rate) +
         ',' + num(s.p1) + ',' + num(s.p2) + ',' + num(s.p3plus);
}

std::string json_record(const RunRow& r) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["N"] = r.nodes;
  j["v_kph"] = r.v_kph;
  j["seed"] = r.seed;
  if (!r.error.empty()) {
    j["error"] = r.error;
    return j.dump();
  }
  const Summary& s = r.summary;
  j["frame_loss_rate"] = s.frame_loss_rate;
  j["call_drop_rate"] = s.call_drop_rate;
  j["call_block_rate"] = s.call_block_rate;
  j["p1"] = s.p1;
  j["p2"] = s.p2;
  j["p3plus"] = s.p3plus;
  j["no_frames"] = s.no_frames;
  j["no_calls"] = s.no_calls;
  const MetricsRecord& m = r.record;
  j["counts"] = {
      {"frames_generated", m.frames_generated},
      {"frames_delivered", m.frames_delivered},
      {"frames_lost", m.frames_lost},
      {"calls_started", m.calls_started},
      {"calls_completed", m.calls_completed},
      {"calls_dropped", m.calls_dropped},
      {"calls_blocked", m.calls_blocked},
      {"calls_in_progress", m.calls_in_progress},
      {"probe_slots_1", m.probes.one},
      {"probe_slots_2", m.probes.two},
      {"probe_slots_3plus", m.probes.three_plus},
      {"half_duplex_violations", m.half_duplex_violations},
      {"is_switches", m.is_switches},
      {"recoveries", m.recoveries},
  };
  return j.dump();
}

std::string summary_csv(const std::vector<CellSummary>& cells) {
  std::string out =
      "N,v_kph,runs,frame_loss_rate_mean,frame_loss_rate_std,call_drop_rate_mean,"
      "call_drop_rate_std,call_block_rate_mean,call_block_rate_std,p1_mean,p1_std,p2_mean,"
      "p2_std,p3plus_mean,p3plus_std\n";
  for (const auto& c : cells) {
    out += std::to_string(c.nodes) + ',' + num(c.v_kph) + ',' + std::to_string(c.runs);
    for (const MetricStats* m : {&c.frame_loss_rate, &c.call_drop_rate, &c.call_block_rate, &c.p1,
                                 &c.p2, &c.p3plus})
      out += ',' + num(m->mean) + ',' + num(m->std);
    out += '\n';
  }
  return out;
}

void write_csv(const std::vector<RunRow>& rows, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << csv_header() << '\n';
  for (const auto& r : rows)
    if (r.error.empty()) out << csv_row(r) << '\n';
}

void write_records(const std::vector<RunRow>& rows, const std::filesystem::path& path) {
  auto out = open_out(path);
  for (const auto& r : rows) out << json_record(r) << '\n';
}

void write_summary(const std::vector<CellSummary>& cells, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << summary_csv(cells);
}

}  // namespace pbmac
