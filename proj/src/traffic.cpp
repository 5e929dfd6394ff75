#include "pbmac/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pbmac {

namespace {

bool inside(Position p, const MobilityState& s) {
  const double dx = p.x - s.anchor.x;
  const double dy = p.y - s.anchor.y;
  return dx * dx + dy * dy <= s.tether_radius * s.tether_radius && p.x >= 0.0 &&
         p.y >= 0.0 && p.x <= s.arena_side && p.y <= s.arena_side;
}

// A redrawn heading must point back across every boundary the failed step crossed.
bool points_inward(Position from, Position failed, double dx, double dy, const MobilityState& s) {
  const double fx = failed.x - s.anchor.x;
  const double fy = failed.y - s.anchor.y;
  if (fx * fx + fy * fy > s.tether_radius * s.tether_radius) {
    if (dx * (s.anchor.x - from.x) + dy * (s.anchor.y - from.y) <= 0.0) return false;
  }
  if (failed.x < 0.0 && dx <= 0.0) return false;
  if (failed.x > s.arena_side && dx >= 0.0) return false;
  if (failed.y < 0.0 && dy <= 0.0) return false;
  if (failed.y > s.arena_side && dy >= 0.0) return false;
  return true;
}

}  // namespace

Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), 0x9e3779b9u};
  return Rng(seq);
}

double kph_to_mps(double kph) { return kph * 1000.0 / 3600.0; }

int frames_to_send(const CallWindow& call, std::int64_t frame) {
  return frame >= call.start_frame && frame < call.end_frame ? 1 : 0;
}

CallProcess::CallProcess(std::size_t sources, double mean_interarrival_s, double mean_duration_s,
                         double frame_s, std::uint64_t seed)
    : mean_interarrival_(mean_interarrival_s),
      mean_duration_(mean_duration_s),
      frame_s_(frame_s),
      rng_(make_stream(seed, 4)),
      next_arrival_(sources),
      busy_(sources, false) {
  if (!(mean_interarrival_s > 0.0) || !(mean_duration_s > 0.0) || !(frame_s > 0.0))
    throw std::invalid_argument("call process means and frame length must be positive");
  for (auto& t : next_arrival_) t = draw_interarrival();
}

double CallProcess::draw_interarrival() {
  return std::exponential_distribution<double>(1.0 / mean_interarrival_)(rng_);
}

std::int64_t CallProcess::draw_duration_frames() {
  const double d = std::exponential_distribution<double>(1.0 / mean_duration_)(rng_);
  return std::max<std::int64_t>(1, std::llround(d / frame_s_));
}

std::vector<NewCall> CallProcess::arrivals_for_frame(std::int64_t frame) {
  std::vector<NewCall> out;
  const double frame_end = static_cast<double>(frame + 1) * frame_s_;
  for (std::size_t s = 0; s < next_arrival_.size(); ++s) {
    if (busy_[s] || next_arrival_[s] >= frame_end) continue;
    busy_[s] = true;
    out.push_back({s, frame, draw_duration_frames()});
  }
  return out;
}

void CallProcess::call_finished(std::size_t source, std::int64_t frame) {
  busy_[source] = false;
  next_arrival_[source] = static_cast<double>(frame) * frame_s_ + draw_interarrival();
}

MobilityState step_mobility(const MobilityState& state, double dt_s, Rng& rng) {
  if (state.speed_mps < 0.0) throw std::invalid_argument("speed must be non-negative");
  MobilityState next = state;
  const double step = state.speed_mps * dt_s;
  if (step == 0.0) return next;

  const Position from = state.position;
  Position to{from.x + step * std::cos(state.heading), from.y + step * std::sin(state.heading)};
  if (inside(to, state)) {
    next.position = to;
    return next;
  }

  const Position failed = to;
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  for (int attempt = 0; attempt < 64; ++attempt) {
    const double h = angle(rng);
    const double dx = std::cos(h);
    const double dy = std::sin(h);
    if (!points_inward(from, failed, dx, dy, state)) continue;
    to = {from.x + step * dx, from.y + step * dy};
    if (inside(to, state)) {
      next.heading = h;
      next.position = to;
      return next;
    }
  }

  // Head straight for the anchor; both regions are convex and contain it.
  const double ax = state.anchor.x - from.x;
  const double ay = state.anchor.y - from.y;
  const double len = std::hypot(ax, ay);
  if (len == 0.0) return next;
  next.heading = std::atan2(ay, ax);
  const double s = std::min(step, len);
  next.position = {from.x + s * ax / len, from.y + s * ay / len};
  return next;
}

Position random_point_in_tether(Position anchor, double radius, double arena_side, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (;;) {
    const double r = radius * std::sqrt(unit(rng));
    const double a = 2.0 * std::numbers::pi * unit(rng);
    const Position p{anchor.x + r * std::cos(a), anchor.y + r * std::sin(a)};
    if (p.x >= 0.0 && p.y >= 0.0 && p.x <= arena_side && p.y <= arena_side) return p;
  }
}

}  // namespace pbmac
