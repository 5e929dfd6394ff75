#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pbmac/channel.hpp"
#include "pbmac/config.hpp"
#include "pbmac/mac.hpp"
#include "pbmac/metrics.hpp"
#include "pbmac/phy.hpp"
#include "pbmac/traffic.hpp"

namespace pbmac {

/// Position inside a frame: IS k is followed by BS k, frames hold M pairs.
struct FrameClock {
  enum class Phase : std::uint8_t { information, blocking };

  std::int64_t frame = 0;
  int slot = 0;
  Phase phase = Phase::information;
  int slots_per_frame = 8;
  double frame_s = 0.020;

  void advance();
  double time_s() const { return static_cast<double>(frame) * frame_s; }
};

/// What one receiver saw during one information slot.
struct ReceiverReport {
  NodeId node = 0;
  SlotRole role = SlotRole::idle;
  phy::SlotMeasurement measurement;
  std::optional<std::size_t> desired;  // index into the slot's transmissions
  bool decoded = false;
  double margin = 0.0;                 // against non-probe interference
  double blocking_power = 0.0;         // 0 when no blocking message was sent
};

struct ProbeReport {
  NodeId prober = 0;
  double blocking_rx = 0.0;
  bool blocked = false;
};

struct SlotView {
  std::int64_t frame = 0;
  int slot = 0;
  std::span<const Transmission> transmissions;
  std::span<const ReceiverReport> receivers;  // nodes with a desired signal or probe energy
  std::span<const ProbeReport> probes;
  const ChannelMatrix& channel;
  const phy::PhyParams& phy;
};

class SlotObserver {
 public:
  virtual ~SlotObserver() = default;
  virtual void on_slot(const SlotView& view) = 0;
};

/// Measurement of `receiver` in one slot from the slot's transmission list.
/// Returns the index of the desired transmission, if any.
std::optional<std::size_t> slot_interference(NodeId receiver, std::span<const Transmission> ledger,
                                             const ChannelMatrix& channel,
                                             phy::SlotMeasurement& out);

struct ScriptedCall {
  std::size_t pair = 0;
  std::int64_t arrival_frame = 0;
  std::int64_t duration_frames = 1;
};

/// Deterministic placement and traffic overrides used by tests and
/// hand-built scenarios.
struct Scenario {
  std::vector<Position> sources;        // empty: random placement
  std::vector<Position> destinations;
  bool zero_shadowing = false;          // start every pair at 0 dB
  bool random_arrivals = true;
  std::vector<ScriptedCall> calls;      // started when due and the pair is idle
};

/// One simulation run. Nodes 2p and 2p+1 are the source and destination of
/// pair p; sources are fixed and destinations move inside their tether.
class Simulator {
 public:
  explicit Simulator(const SimConfig& config);
  Simulator(const SimConfig& config, Scenario scenario);

  /// Advances one frame: mobility and channel, arrivals, every IS/BS pair in
  /// order, then frame-end bookkeeping.
  void step();
  void run_frames(std::int64_t frames);

  /// Runs to config.total_frames and returns the finished record.
  MetricsRecord run();

  /// Snapshot with calls_in_progress filled in.
  MetricsRecord metrics() const;

  std::int64_t frame() const { return frame_; }
  const SimConfig& config() const { return config_; }
  const ChannelMatrix& channel() const { return channel_; }
  std::span<const NodeState> nodes() const { return nodes_; }
  std::span<const Link> links() const { return links_; }
  std::span<const CallRecord> finished_calls() const { return finished_; }
  std::span<const MobilityState> mobility() const { return mobility_; }

  void set_observer(SlotObserver* observer) { observer_ = observer; }

 private:
  void place_nodes();
  void advance_environment();
  void start_arrivals();
  void process_slot(int slot);
  void record_finished(const CallRecord& record);
  bool counted(std::int64_t frame) const { return frame >= warmup_; }

  SimConfig config_;
  Scenario scenario_;
  phy::PhyParams phy_;
  std::int64_t warmup_ = 0;
  std::int64_t frame_ = 0;

  std::vector<NodeState> nodes_;
  std::vector<Position> positions_;
  std::vector<MobilityState> mobility_;
  std::vector<Link> links_;
  ChannelMatrix channel_;
  std::vector<std::size_t> mobile_pairs_;
  std::vector<double> draws_;
  CallProcess calls_;

  Rng placement_rng_;
  Rng shadow_rng_;
  Rng mobility_rng_;

  MetricsRecord metrics_;
  std::vector<CallRecord> finished_;
  SlotObserver* observer_ = nullptr;

  // Per-slot scratch.
  std::vector<Transmission> ledger_;
  std::vector<ReceiverReport> receivers_;
  std::vector<ProbeReport> probes_;
  std::vector<char> transmitting_;
  std::vector<std::pair<NodeId, double>> blockers_;
};

/// Runs `config` to completion.
MetricsRecord run(const SimConfig& config);

}  // namespace pbmac
