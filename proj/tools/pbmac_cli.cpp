// Command-line driver: single runs and (N, v) sweeps.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "pbmac/config.hpp"
#include "pbmac/sweep.hpp"

namespace {

pbmac::SimConfig base_config(const std::string& path) {
  return path.empty() ? pbmac::SimConfig{} : pbmac::load_config(path);
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            std::optional<std::int64_t> frames, std::optional<int> nodes,
            std::optional<double> v_kph, const std::string& out_path, const std::string& format) {
  auto config = base_config(config_path);
  if (seed) config.seed = *seed;
  if (frames) config.total_frames = *frames;
  if (nodes) config.nodes = *nodes;
  if (v_kph) config.velocity_kph = *v_kph;
  config.validate();

  const auto row = pbmac::run_one(config);
  if (!row.error.empty()) throw pbmac::ConfigError(row.error);

  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw std::runtime_error("cannot write '" + out_path + "'");
  }
  std::ostream& out = out_path.empty() ? std::cout : file;
  if (format == "csv") {
    out << pbmac::csv_header() << '\n' << pbmac::csv_row(row) << '\n';
  } else {
    out << pbmac::json_record(row) << '\n';
  }
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::vector<int>& nodes,
              const std::vector<double>& velocities, int reps, const std::string& out_dir,
              std::optional<std::int64_t> frames) {
  auto config = base_config(config_path);
  if (frames) config.total_frames = *frames;
  config.validate();
  if (reps < 1) throw pbmac::ConfigError("--reps must be >= 1");

  pbmac::SweepGrid grid{nodes, velocities, reps};
  // Reject bad cells before spending time on the good ones.
  for (int n : nodes) {
    auto c = config;
    c.nodes = n;
    for (double v : velocities) {
      c.velocity_kph = v;
      c.validate();
    }
  }

  const auto rows = pbmac::sweep_parallel(config, grid);
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  pbmac::write_csv(rows, dir / "runs.csv");
  pbmac::write_records(rows, dir / "runs.jsonl");
  pbmac::write_summary(pbmac::summarize(rows), dir / "summary.csv");
  std::cout << "wrote " << rows.size() << " runs to " << dir.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Probe-and-block CDMA MAC simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::int64_t> frames;

  auto* run = app.add_subcommand("run", "Run one simulation");
  std::optional<std::uint64_t> seed;
  std::optional<int> run_nodes;
  std::optional<double> run_v;
  std::string out_path;
  std::string format = "records";
  run->add_option("--config", config_path, "Config file (key = value)")->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Override seed");
  run->add_option("--frames", frames, "Override total_frames");
  run->add_option("--nodes", run_nodes, "Override N");
  run->add_option("--v", run_v, "Override v_kph");
  run->add_option("--out", out_path, "Output file (default stdout)");
  run->add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"csv", "records"}));

  auto* sweep = app.add_subcommand("sweep", "Run a grid of (N, v) cells");
  std::vector<int> sweep_nodes{20, 40, 60, 80, 100};
  std::vector<double> sweep_v{0.0, 10.0, 20.0};
  int reps = 5;
  std::string out_dir = "sweep_out";
  sweep->add_option("--config", config_path, "Config file (key = value)")->check(CLI::ExistingFile);
  sweep->add_option("--n", sweep_nodes, "Node counts")->delimiter(',');
  sweep->add_option("--v", sweep_v, "Velocities in km/h")->delimiter(',');
  sweep->add_option("--reps", reps, "Replications per cell");
  sweep->add_option("--frames", frames, "Override total_frames");
  sweep->add_option("--out", out_dir, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path, seed, frames, run_nodes, run_v, out_path, format);
    return cmd_sweep(config_path, sweep_nodes, sweep_v, reps, out_dir, frames);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
