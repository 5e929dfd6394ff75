#pragma once

#include <cstdint>

namespace pbmac {

/// Number of simultaneous probe senders seen in information slots that
/// carried at least one probe.
struct ProbeHistogram {
  std::uint64_t one = 0;
  std::uint64_t two = 0;
  std::uint64_t three_plus = 0;

  void record(int count);
  std::uint64_t total() const { return one + two + three_plus; }
  double fraction_one() const;
  double fraction_two() const;
  double fraction_three_plus() const;

  friend bool operator==(const ProbeHistogram&, const ProbeHistogram&) = default;
};

struct MetricsRecord {
  std::uint64_t frames_generated = 0;
  std::uint64_t frames_delivered = 0;
  std::uint64_t frames_lost = 0;
  std::uint64_t calls_started = 0;
  std::uint64_t calls_completed = 0;
  std::uint64_t calls_dropped = 0;
  std::uint64_t calls_blocked = 0;
  std::uint64_t calls_in_progress = 0;  // set when the run finishes
  ProbeHistogram probes;
  std::uint64_t half_duplex_violations = 0;
  std::uint64_t is_switches = 0;
  std::uint64_t recoveries = 0;

  void record_probe_slot(int count) { probes.record(count); }

  friend bool operator==(const MetricsRecord&, const MetricsRecord&) = default;
};

struct Summary {
  double frame_loss_rate = 0.0;
  double call_drop_rate = 0.0;
  double call_block_rate = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
  double p3plus = 0.0;
  bool no_frames = false;  // rates with a zero denominator are reported as 0
  bool no_calls = false;
};

Summary finalize(const MetricsRecord& record);

/// frames_generated == delivered + lost and
/// calls_started == completed + dropped + blocked + in_progress.
bool accounting_holds(const MetricsRecord& record);

}  // namespace pbmac
