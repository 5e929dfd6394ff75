#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "pbmac/channel.hpp"

namespace pbmac {

using Rng = std::mt19937_64;

/// Independent deterministic stream for one purpose within a run.
Rng make_stream(std::uint64_t seed, std::uint64_t stream);

double kph_to_mps(double kph);

// ---------------------------------------------------------------------------
// Voice calls

struct NewCall {
  std::size_t source = 0;          // pair index
  std::int64_t arrival_frame = 0;
  std::int64_t duration_frames = 1;
};

/// Conversation window of an established call, [start_frame, end_frame).
struct CallWindow {
  std::int64_t start_frame = 0;
  std::int64_t end_frame = 0;
};

/// One DATA frame per frame while the conversation is running.
int frames_to_send(const CallWindow& call, std::int64_t frame);

/// Per-source call process. Each source alternates between an idle gap
/// (exponential, mean_interarrival) and a call (exponential holding time,
/// mean_duration). A source never holds two calls: the next gap starts when
/// the previous call has finished, whatever its outcome.
class CallProcess {
 public:
  CallProcess(std::size_t sources, double mean_interarrival_s, double mean_duration_s,
              double frame_s, std::uint64_t seed);

  /// Calls whose arrival time falls within `frame`; marks those sources busy.
  std::vector<NewCall> arrivals_for_frame(std::int64_t frame);

  /// Frees `source`; its next arrival is drawn from the start of `frame`.
  void call_finished(std::size_t source, std::int64_t frame);

  bool busy(std::size_t source) const { return busy_[source]; }
  double next_arrival_s(std::size_t source) const { return next_arrival_[source]; }

  double draw_interarrival();
  std::int64_t draw_duration_frames();

 private:
  double mean_interarrival_;
  double mean_duration_;
  double frame_s_;
  Rng rng_;
  std::vector<double> next_arrival_;
  std::vector<bool> busy_;
};

// ---------------------------------------------------------------------------
// Destination mobility

struct MobilityState {
  Position anchor;     // fixed source position
  Position position;
  double heading = 0.0;  // radians
  double speed_mps = 0.0;
  double tether_radius = 150.0;
  double arena_side = 1000.0;
};

/// Straight-line motion along the current heading. When a step would leave
/// the tether disk or the arena, the heading is redrawn among directions
/// pointing back inside and the step retried.
MobilityState step_mobility(const MobilityState& state, double dt_s, Rng& rng);

/// Uniform point in the tether disk around `anchor`, restricted to the arena.
Position random_point_in_tether(Position anchor, double radius, double arena_side, Rng& rng);

}  // namespace pbmac
