#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

#include "pbmac/channel.hpp"
#include "pbmac/config.hpp"
#include "pbmac/sweep.hpp"

namespace {

struct Fixture {
  explicit Fixture(std::size_t nodes) : channel(nodes, 2.4), positions(nodes), draws(channel.pairs()) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1000.0);
    std::normal_distribution<double> z;
    for (auto& p : positions) p = {u(rng), u(rng)};
    for (auto& s : channel.shadows()) s.epsilon = 0.99;
    for (auto& d : draws) d = z(rng);
    pairs.resize(channel.pairs());
    std::iota(pairs.begin(), pairs.end(), std::size_t{0});
  }
  pbmac::ChannelMatrix channel;
  std::vector<pbmac::Position> positions;
  std::vector<double> draws;
  std::vector<std::size_t> pairs;
};

void BM_GainsSerial(benchmark::State& st) {
  Fixture f(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) {
    pbmac::refresh_gains_serial(f.positions, f.channel, f.pairs);
    benchmark::ClobberMemory();
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(f.pairs.size()));
}

void BM_GainsParallel(benchmark::State& st) {
  Fixture f(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) {
    pbmac::refresh_gains_parallel(f.positions, f.channel, f.pairs);
    benchmark::ClobberMemory();
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(f.pairs.size()));
}

void BM_ShadowSerial(benchmark::State& st) {
  Fixture f(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) {
    pbmac::advance_shadowing_serial(f.channel, f.pairs, f.draws);
    benchmark::ClobberMemory();
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(f.pairs.size()));
}

void BM_ShadowParallel(benchmark::State& st) {
  Fixture f(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) {
    pbmac::advance_shadowing_parallel(f.channel, f.pairs, f.draws);
    benchmark::ClobberMemory();
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(f.pairs.size()));
}

pbmac::SimConfig sweep_config() {
  pbmac::SimConfig c;
  c.total_frames = 2000;
  return c;
}

const pbmac::SweepGrid kGrid{{20, 40}, {0.0, 10.0}, 2};

void BM_SweepSerial(benchmark::State& st) {
  const auto c = sweep_config();
  for (auto _ : st) benchmark::DoNotOptimize(pbmac::sweep_serial(c, kGrid));
}

void BM_SweepParallel(benchmark::State& st) {
  const auto c = sweep_config();
  for (auto _ : st) benchmark::DoNotOptimize(pbmac::sweep_parallel(c, kGrid));
}

}  // namespace

BENCHMARK(BM_GainsSerial)->Arg(100)->Arg(400);
BENCHMARK(BM_GainsParallel)->Arg(100)->Arg(400);
BENCHMARK(BM_ShadowSerial)->Arg(100)->Arg(400);
BENCHMARK(BM_ShadowParallel)->Arg(100)->Arg(400);
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
