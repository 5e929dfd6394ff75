#include "pbmac/channel.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pbmac {

namespace {

// dB -> natural-log scale for 10^(x/10).
constexpr double kDbToLn = 0.23025850929940456840;

// Below this many pairs the parallel region costs more than it saves.
constexpr std::size_t kParallelThreshold = 2048;

inline double pair_gain(Position a, Position b, double beta, double shadow_db) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double d2 = dx * dx + dy * dy;
  // path_loss(d) * 10^(s/10) folded into one exp; d < 1 m clamps to unity.
  const double log_pl = d2 > 1.0 ? -0.5 * beta * std::log(d2) : 0.0;
  return std::exp(log_pl + shadow_db * kDbToLn);
}

inline void step_in_place(ShadowState& s, double draw) {
  if (s.epsilon >= 1.0) return;
  s.value_db = s.epsilon * s.value_db +
               std::sqrt(1.0 - s.epsilon * s.epsilon) * s.sigma_db * draw;
}

}  // namespace

double distance(Position a, Position b) { return std::hypot(a.x - b.x, a.y - b.y); }

double path_loss(double distance_m, double beta) {
  if (distance_m <= 1.0) return 1.0;
  return std::pow(distance_m, -beta);
}

ShadowState step_shadowing(const ShadowState& state, double draw) {
  ShadowState next = state;
  step_in_place(next, draw);
  return next;
}

double shadow_correlation(double speed_mps, double frame_s, double corr_distance_m) {
  if (corr_distance_m <= 0.0) throw std::invalid_argument("correlation distance must be positive");
  return std::exp(-speed_mps * frame_s / corr_distance_m);
}

ChannelMatrix::ChannelMatrix(std::size_t nodes, double beta) : nodes_(nodes), beta_(beta) {
  const std::size_t count = nodes < 2 ? 0 : nodes * (nodes - 1) / 2;
  gains_.assign(count, 1.0);
  shadows_.assign(count, ShadowState{});
  first_.reserve(count);
  second_.reserve(count);
  for (NodeId a = 0; a < nodes; ++a) {
    for (NodeId b = a + 1; b < nodes; ++b) {
      first_.push_back(a);
      second_.push_back(b);
    }
  }
}

void refresh_gains_serial(std::span<const Position> positions, ChannelMatrix& channel,
                          std::span<const std::size_t> pairs) {
  auto gains = channel.gains();
  const auto shadows = channel.shadows();
  const double beta = channel.beta();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const std::size_t p = pairs[i];
    gains[p] = pair_gain(positions[channel.first(p)], positions[channel.second(p)], beta,
                         shadows[p].value_db);
  }
}

void refresh_gains_parallel(std::span<const Position> positions, ChannelMatrix& channel,
                            std::span<const std::size_t> pairs) {
  auto gains = channel.gains();
  const auto shadows = channel.shadows();
  const double beta = channel.beta();
  const auto n = static_cast<std::ptrdiff_t>(pairs.size());
#pragma omp parallel for schedule(static) if (pairs.size() >= kParallelThreshold)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::size_t p = pairs[i];
    gains[p] = pair_gain(positions[channel.first(p)], positions[channel.second(p)], beta,
                         shadows[p].value_db);
  }
}

void advance_shadowing_serial(ChannelMatrix& channel, std::span<const std::size_t> pairs,
                              std::span<const double> draws) {
  assert(draws.size() >= pairs.size());
  auto shadows = channel.shadows();
  for (std::size_t i = 0; i < pairs.size(); ++i) step_in_place(shadows[pairs[i]], draws[i]);
}

void advance_shadowing_parallel(ChannelMatrix& channel, std::span<const std::size_t> pairs,
                                std::span<const double> draws) {
  assert(draws.size() >= pairs.size());
  auto shadows = channel.shadows();
  const auto n = static_cast<std::ptrdiff_t>(pairs.size());
#pragma omp parallel for schedule(static) if (pairs.size() >= kParallelThreshold)
  for (std::ptrdiff_t i = 0; i < n; ++i) step_in_place(shadows[pairs[i]], draws[i]);
}

void refresh_gains(std::span<const Position> positions, ChannelMatrix& channel) {
  if (positions.size() != channel.nodes())
    throw std::invalid_argument("position count does not match channel size");
  std::vector<std::size_t> all(channel.pairs());
  std::iota(all.begin(), all.end(), std::size_t{0});
  refresh_gains_parallel(positions, channel, all);
}

}  // namespace pbmac
