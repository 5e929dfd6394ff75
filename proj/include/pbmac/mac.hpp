#pragma once

#include <array>
#include <bitset>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pbmac/channel.hpp"
#include "pbmac/phy.hpp"
#include "pbmac/traffic.hpp"

namespace pbmac {

inline constexpr int kMaxSlots = 64;
using SlotSet = std::bitset<kMaxSlots>;
inline constexpr NodeId kNoNode = ~NodeId{0};

enum class SlotRole : std::uint8_t { idle, tx_data, rx_data, tx_ack, rx_ack };

constexpr bool is_receive(SlotRole r) { return r == SlotRole::rx_data || r == SlotRole::rx_ack; }
constexpr bool is_transmit(SlotRole r) { return r == SlotRole::tx_data || r == SlotRole::tx_ack; }

enum class TxKind : std::uint8_t { data, ack, request, probe };

/// Up to two information slots, best first.
struct IsCandidates {
  std::array<int, 2> slots{-1, -1};

  int size() const { return (slots[0] >= 0 ? 1 : 0) + (slots[1] >= 0 ? 1 : 0); }
  bool empty() const { return slots[0] < 0; }
  bool contains(int is) const { return is >= 0 && (slots[0] == is || slots[1] == is); }
};

struct AckPayload {
  bool is_nack = false;
  IsCandidates candidates;  // candidate DATA slots for re-establishment
  bool failure_flag = false;
};

struct RequestPayload {
  IsCandidates ack_candidates;  // one slot at setup, two when re-establishing both
};

struct Transmission {
  NodeId sender = kNoNode;
  NodeId target = kNoNode;  // kNoNode for probes
  TxKind kind = TxKind::probe;
  double power = 0.0;
  std::size_t link = 0;
  AckPayload ack;
  RequestPayload request;
};

/// Per-node view of the shared band: slot roles plus the measurement cache
/// built from the most recent frame in which each slot could be observed.
struct NodeState {
  NodeState() = default;
  NodeState(NodeId node, Position pos, int slots);

  NodeId id = 0;
  Position position;
  std::vector<SlotRole> schedule;
  std::vector<double> interference;
  std::vector<std::vector<std::uint32_t>> detected_codes;

  std::uint32_t tx_code() const { return 2 * id; }
  std::uint32_t rx_code() const { return 2 * id + 1; }

  SlotSet transmit_slots() const;
  SlotSet slots_with_code(std::uint32_t code) const;
};

// ---------------------------------------------------------------------------
// Slot selection

/// Minimum-interference slot outside `dest_tx` and `excluded`; lowest index
/// wins ties. Empty when every slot is ruled out.
std::optional<int> select_data_is(std::span<const double> interference, SlotSet dest_tx,
                                  SlotSet excluded);

/// The `count` (1 or 2) lowest-interference slots outside `excluded`, in
/// ascending interference order.
IsCandidates lowest_interference_slots(std::span<const double> interference, SlotSet excluded,
                                       int count);

/// An active receiver's response to probe energy in its slot: the blocking
/// power to send, or nothing. Only receivers with a positive margin that the
/// predicted increase would exceed respond.
std::optional<double> on_probe_received(SlotRole role, const phy::SlotMeasurement& m,
                                        const phy::PhyParams& params);

// ---------------------------------------------------------------------------
// Link state machine

enum class LinkPhase : std::uint8_t {
  select_data_is,
  probe_data,
  await_block_data,
  send_request,
  await_ack,
  active,
  reestablish_both,
  reestablish_data_only,
  dropped,
  done,
  blocked,
};

enum class LinkEvent : std::uint8_t {
  selection_made,
  no_eligible_is,
  probe_sent,
  probe_clear,
  probe_blocked,
  request_sent,
  ack_received,
  nack_received,
  ack_missing,
  attempts_exhausted,
  candidates_blocked,
  request_lost,
  rebound,
  call_ended,
};

inline constexpr int kPhaseCount = 11;
inline constexpr int kEventCount = 14;

/// Total transition function. Inputs with no edge leave the phase unchanged;
/// dropped, done and blocked are absorbing.
LinkPhase transition(LinkPhase phase, LinkEvent event);
bool is_absorbing(LinkPhase phase);
const char* to_string(LinkPhase phase);

enum class CallOutcome : std::uint8_t { completed, dropped, blocked };

struct CallRecord {
  std::size_t pair = 0;
  std::int64_t arrival_frame = 0;
  std::int64_t established_frame = -1;
  std::int64_t first_delivery_frame = -1;
  std::int64_t end_frame = -1;
  std::int64_t frames_generated = 0;
  std::int64_t frames_lost = 0;
  int attempts = 0;
  int switches = 0;
  int recoveries = 0;
  std::optional<CallOutcome> outcome;
};

/// State of one call on a source-destination pair.
struct LinkContext {
  LinkPhase phase = LinkPhase::select_data_is;
  int data_is = -1;
  int ack_is = -1;
  int attempts = 0;
  IsCandidates candidate_data_is;  // from the last good ACK
  IsCandidates candidate_ack_is;   // carried in the last request
  std::int64_t frames_sent = 0;
  std::int64_t frames_lost = 0;
};

struct MacParams {
  int slots = 8;
  int max_attempts = 3;
  double tx_power = 0.1;
  double probe_power = 0.001;
};

/// What a link reports at the end of each frame.
struct FrameReport {
  int generated = 0;
  int delivered = 0;
  int lost = 0;
  std::optional<CallRecord> finished;
};

/// Drives one source-destination pair through setup, continuous
/// transmission, failure recovery and release. The engine calls the hooks
/// in slot order; the link never touches nodes other than its two endpoints.
class Link {
 public:
  Link(std::size_t index, NodeId source, NodeId destination, MacParams params);

  std::size_t index() const { return index_; }
  NodeId source() const { return source_; }
  NodeId destination() const { return destination_; }

  bool in_call() const { return call_.has_value(); }
  const LinkContext* context() const { return call_ ? &call_->ctx : nullptr; }
  const CallRecord* record() const { return call_ ? &call_->record : nullptr; }

  void start_call(std::int64_t arrival_frame, std::int64_t duration_frames);

  /// Releases an established call whose conversation has run its length.
  std::optional<CallRecord> complete_if_due(std::int64_t frame, std::span<NodeState> nodes);

  void emit(std::int64_t frame, int is, std::span<const NodeState> nodes,
            std::vector<Transmission>& out);
  void on_reception(std::int64_t frame, int is, const Transmission& tx, bool decoded,
                    std::span<NodeState> nodes);
  void on_probe_result(std::int64_t frame, int is, NodeId prober, bool blocked,
                       std::span<NodeState> nodes);
  void on_slot_end(std::int64_t frame, int is, std::span<NodeState> nodes);
  FrameReport on_frame_end(std::int64_t frame, std::span<NodeState> nodes);

 private:
  struct Planned {
    std::int64_t frame;
    int is;
    TxKind kind;
    bool from_source;
    IsCandidates payload;
    bool nack;
  };

  enum class ProbeState : std::int8_t { none, pending, clear, blocked };

  struct Recovery {
    IsCandidates data;
    std::array<ProbeState, 2> data_probe{ProbeState::none, ProbeState::none};
    IsCandidates ack;
    std::array<ProbeState, 2> ack_probe{ProbeState::none, ProbeState::none};
    int new_data_is = -1;
    std::int64_t started = 0;
  };

  struct Call {
    LinkContext ctx;
    CallRecord record;
    std::int64_t duration_frames = 1;
    CallWindow window{-1, -1};
    std::int64_t select_after = 0;        // selection happens at the end of this frame
    SlotSet excluded;
    int probe_is = -1;                    // setup DATA probe slot
    std::int64_t data_from = -1;          // first DATA frame of the current binding
    std::int64_t expected_ack_frame = -1;
    std::int64_t ack_seen_frame = -1;
    std::int64_t last_ok = -1;            // last two frames with a decoded DATA
    std::int64_t prev_ok = -1;
    std::int64_t accounted_through = -1;
    bool dest_bound = false;              // destination holds rx at data_is and tx at ack_is
    int dest_ack_probe = -1;              // setup ACK probe slot, pending at destination
    std::optional<Recovery> recovery;
  };

  void apply(LinkEvent e);
  void release_source(std::span<NodeState> nodes);
  void release_destination(std::span<NodeState> nodes);
  void bind(std::span<NodeState> nodes, int data_is, int ack_is, std::int64_t data_from);
  void start_recovery(LinkPhase kind, std::int64_t frame, std::span<NodeState> nodes);
  void fail_setup_attempt(std::int64_t frame, std::span<NodeState> nodes);
  void finish_recovery_probes(std::int64_t frame, std::span<NodeState> nodes);
  void resolve_ack_probes(std::int64_t frame, std::span<NodeState> nodes);
  bool established() const;
  void account(std::int64_t through, FrameReport& report);
  void plan(std::int64_t frame, int is, TxKind kind, bool from_source, IsCandidates payload = {},
            bool nack = false);

  std::size_t index_;
  NodeId source_;
  NodeId destination_;
  MacParams params_;
  std::optional<Call> call_;
  std::vector<Planned> planned_;
};

}  // namespace pbmac
