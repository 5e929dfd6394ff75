#include "pbmac/mac.hpp"

#include <algorithm>
#include <stdexcept>

namespace pbmac {

NodeState::NodeState(NodeId node, Position pos, int slots)
    : id(node),
      position(pos),
      schedule(static_cast<std::size_t>(slots), SlotRole::idle),
      interference(static_cast<std::size_t>(slots), 0.0),
      detected_codes(static_cast<std::size_t>(slots)) {}

SlotSet NodeState::transmit_slots() const {
  SlotSet out;
  for (std::size_t i = 0; i < schedule.size(); ++i)
    if (is_transmit(schedule[i])) out.set(i);
  return out;
}

SlotSet NodeState::slots_with_code(std::uint32_t code) const {
  SlotSet out;
  for (std::size_t i = 0; i < detected_codes.size(); ++i) {
    const auto& codes = detected_codes[i];
    if (std::find(codes.begin(), codes.end(), code) != codes.end()) out.set(i);
  }
  return out;
}

std::optional<int> select_data_is(std::span<const double> interference, SlotSet dest_tx,
                                  SlotSet excluded) {
  int best = -1;
  for (std::size_t i = 0; i < interference.size(); ++i) {
    if (dest_tx.test(i) || excluded.test(i)) continue;
    if (best < 0 || interference[i] < interference[static_cast<std::size_t>(best)])
      best = static_cast<int>(i);
  }
  if (best < 0) return std::nullopt;
  return best;
}

IsCandidates lowest_interference_slots(std::span<const double> interference, SlotSet excluded,
                                       int count) {
  IsCandidates out;
  for (int n = 0; n < std::min(count, 2); ++n) {
    const auto pick = select_data_is(interference, SlotSet{}, excluded);
    if (!pick) break;
    out.slots[static_cast<std::size_t>(n)] = *pick;
    excluded.set(static_cast<std::size_t>(*pick));
  }
  return out;
}

std::optional<double> on_probe_received(SlotRole role, const phy::SlotMeasurement& m,
                                        const phy::PhyParams& params) {
  if (!is_receive(role) || m.probe_rx <= 0.0) return std::nullopt;
  // The margin is judged against existing transmissions; probe energy is
  // accounted separately through the prediction.
  const double existing = std::max(0.0, m.interference - m.probe_rx);
  const double margin = phy::interference_margin(m.desired_rx, params.data_spreading_gain, existing,
                                                 params.noise, params.sinr_threshold);
  if (margin <= 0.0) return std::nullopt;
  if (!phy::would_block(m.probe_rx, params.probe_fraction, margin)) return std::nullopt;
  return phy::blocking_power(m.probe_rx, margin, params);
}

// ---------------------------------------------------------------------------

LinkPhase transition(LinkPhase phase, LinkEvent event) {
  using P = LinkPhase;
  using E = LinkEvent;
  switch (phase) {
    case P::select_data_is:
      if (event == E::selection_made) return P::probe_data;
      if (event == E::no_eligible_is) return P::blocked;
      break;
    case P::probe_data:
      if (event == E::probe_sent) return P::await_block_data;
      break;
    case P::await_block_data:
      if (event == E::probe_clear) return P::send_request;
      if (event == E::probe_blocked) return P::select_data_is;
      break;
    case P::send_request:
      if (event == E::request_sent) return P::await_ack;
      break;
    case P::await_ack:
      if (event == E::ack_received) return P::active;
      if (event == E::nack_received) return P::reestablish_data_only;
      if (event == E::ack_missing) return P::select_data_is;
      if (event == E::attempts_exhausted) return P::blocked;
      break;
    case P::active:
      if (event == E::nack_received) return P::reestablish_data_only;
      if (event == E::ack_missing) return P::reestablish_both;
      if (event == E::call_ended) return P::done;
      break;
    case P::reestablish_both:
    case P::reestablish_data_only:
      if (event == E::rebound) return P::active;
      if (event == E::candidates_blocked || event == E::request_lost) return P::dropped;
      if (event == E::call_ended) return P::done;
      break;
    case P::dropped:
    case P::done:
    case P::blocked:
      break;
  }
  return phase;
}

bool is_absorbing(LinkPhase phase) {
  return phase == LinkPhase::dropped || phase == LinkPhase::done || phase == LinkPhase::blocked;
}

const char* to_string(LinkPhase phase) {
  switch (phase) {
    case LinkPhase::select_data_is: return "select_data_is";
    case LinkPhase::probe_data: return "probe_data";
    case LinkPhase::await_block_data: return "await_block_data";
    case LinkPhase::send_request: return "send_request";
    case LinkPhase::await_ack: return "await_ack";
    case LinkPhase::active: return "active";
    case LinkPhase::reestablish_both: return "reestablish_both";
    case LinkPhase::reestablish_data_only: return "reestablish_data_only";
    case LinkPhase::dropped: return "dropped";
    case LinkPhase::done: return "done";
    case LinkPhase::blocked: return "blocked";
  }
  return "?";
}

// ---------------------------------------------------------------------------

Link::Link(std::size_t index, NodeId source, NodeId destination, MacParams params)
    : index_(index), source_(source), destination_(destination), params_(params) {
  if (params_.slots < 2 || params_.slots > kMaxSlots)
    throw std::invalid_argument("slot count must lie in [2, 64]");
}

void Link::start_call(std::int64_t arrival_frame, std::int64_t duration_frames) {
  if (call_) throw std::logic_error("start_call on a busy link");
  call_.emplace();
  call_->record.pair = index_;
  call_->record.arrival_frame = arrival_frame;
  call_->duration_frames = std::max<std::int64_t>(1, duration_frames);
  // The frame after arrival is spent listening.
  call_->select_after = arrival_frame + 1;
  planned_.clear();
}

void Link::apply(LinkEvent e) { call_->ctx.phase = transition(call_->ctx.phase, e); }

bool Link::established() const { return call_ && call_->window.start_frame >= 0; }

void Link::plan(std::int64_t frame, int is, TxKind kind, bool from_source, IsCandidates payload,
                bool nack) {
  planned_.push_back({frame, is, kind, from_source, payload, nack});
}

void Link::release_source(std::span<NodeState> nodes) {
  auto& s = nodes[source_].schedule;
  std::fill(s.begin(), s.end(), SlotRole::idle);
}

void Link::release_destination(std::span<NodeState> nodes) {
  auto& s = nodes[destination_].schedule;
  std::fill(s.begin(), s.end(), SlotRole::idle);
  call_->dest_bound = false;
}

void Link::bind(std::span<NodeState> nodes, int data_is, int ack_is, std::int64_t data_from) {
  auto& c = *call_;
  release_source(nodes);
  release_destination(nodes);
  c.ctx.data_is = data_is;
  c.ctx.ack_is = ack_is;
  auto& src = nodes[source_].schedule;
  auto& dst = nodes[destination_].schedule;
  src[static_cast<std::size_t>(data_is)] = SlotRole::tx_data;
  src[static_cast<std::size_t>(ack_is)] = SlotRole::rx_ack;
  dst[static_cast<std::size_t>(data_is)] = SlotRole::rx_data;
  dst[static_cast<std::size_t>(ack_is)] = SlotRole::tx_ack;
  c.dest_bound = true;
  c.data_from = data_from;
}

std::optional<CallRecord> Link::complete_if_due(std::int64_t frame, std::span<NodeState> nodes) {
  if (!established() || is_absorbing(call_->ctx.phase)) return std::nullopt;
  if (frame < call_->window.end_frame) return std::nullopt;
  // No signalling: the slots simply fall silent.
  release_source(nodes);
  release_destination(nodes);
  apply(LinkEvent::call_ended);
  CallRecord rec = call_->record;
  rec.end_frame = frame;
  rec.outcome = CallOutcome::completed;
  call_.reset();
  planned_.clear();
  return rec;
}

void Link::emit(std::int64_t frame, int is, std::span<const NodeState> nodes,
                std::vector<Transmission>& out) {
  if (!call_ || is_absorbing(call_->ctx.phase)) return;
  auto& c = *call_;

  for (auto it = planned_.begin(); it != planned_.end();) {
    if (it->frame != frame || it->is != is) {
      ++it;
      continue;
    }
    Transmission tx;
    tx.link = index_;
    tx.kind = it->kind;
    tx.sender = it->from_source ? source_ : destination_;
    switch (it->kind) {
      case TxKind::probe:
        tx.power = params_.probe_power;
        if (it->from_source && c.ctx.phase == LinkPhase::probe_data) apply(LinkEvent::probe_sent);
        break;
      case TxKind::request:
        tx.target = destination_;
        tx.power = params_.tx_power;
        tx.request.ack_candidates = it->payload;
        if (c.ctx.phase == LinkPhase::send_request) apply(LinkEvent::request_sent);
        break;
      case TxKind::ack: {
        tx.target = source_;
        tx.power = params_.tx_power;
        tx.ack.is_nack = it->nack;
        tx.ack.failure_flag = it->nack;
        const NodeState& dst = nodes[destination_];
        SlotSet excluded = dst.transmit_slots();
        if (c.ctx.data_is >= 0) excluded.set(static_cast<std::size_t>(c.ctx.data_is));
        tx.ack.candidates = lowest_interference_slots(dst.interference, excluded, 2);
        break;
      }
      case TxKind::data:
        break;
    }
    out.push_back(tx);
    it = planned_.erase(it);
  }

  const bool sending = c.ctx.phase == LinkPhase::active ||
                       (c.ctx.phase == LinkPhase::await_ack && frame == c.data_from);
  if (sending && c.ctx.data_is == is && c.data_from >= 0 && frame >= c.data_from) {
    Transmission tx;
    tx.link = index_;
    tx.kind = TxKind::data;
    tx.sender = source_;
    tx.target = destination_;
    tx.power = params_.tx_power;
    out.push_back(tx);
    ++c.ctx.frames_sent;
    c.expected_ack_frame = c.ctx.ack_is > is ? frame : frame + 1;
  }
}

void Link::on_reception(std::int64_t frame, int is, const Transmission& tx, bool decoded,
                        std::span<NodeState> nodes) {
  if (!call_ || !decoded || is_absorbing(call_->ctx.phase)) return;
  auto& c = *call_;
  switch (tx.kind) {
    case TxKind::data:
      c.prev_ok = c.last_ok;
      c.last_ok = frame;
      if (c.record.first_delivery_frame < 0) c.record.first_delivery_frame = frame;
      break;

    case TxKind::request:
      if (c.recovery) {
        auto& rec = *c.recovery;
        if (rec.new_data_is >= 0) break;  // an earlier candidate already got through
        rec.new_data_is = is;
        nodes[destination_].schedule[static_cast<std::size_t>(is)] = SlotRole::rx_data;
        if (c.ctx.phase == LinkPhase::reestablish_data_only) {
          bind(nodes, is, c.ctx.ack_is, frame + 1);
          ++c.record.switches;
          c.recovery.reset();
          apply(LinkEvent::rebound);
        } else {
          rec.ack = tx.request.ack_candidates;
          if (rec.ack.empty()) {
            apply(LinkEvent::candidates_blocked);
            break;
          }
          for (std::size_t j = 0; j < 2; ++j) {
            const int a = rec.ack.slots[j];
            if (a < 0) continue;
            rec.ack_probe[j] = ProbeState::pending;
            plan(a > is ? frame : frame + 1, a, TxKind::probe, false);
          }
        }
      } else if (c.ctx.phase == LinkPhase::await_ack && is == c.ctx.data_is) {
        const int m = tx.request.ack_candidates.slots[0];
        nodes[destination_].schedule[static_cast<std::size_t>(is)] = SlotRole::rx_data;
        c.dest_ack_probe = m;
        // Probe the ACK slot in this frame if it is still ahead, else next frame.
        plan(m > is ? frame : frame + 1, m, TxKind::probe, false);
      }
      break;

    case TxKind::ack:
      if (frame != c.expected_ack_frame || is != c.ctx.ack_is) break;
      c.ack_seen_frame = frame;
      c.expected_ack_frame = -1;
      if (!tx.ack.candidates.empty()) c.ctx.candidate_data_is = tx.ack.candidates;
      if (c.ctx.phase == LinkPhase::await_ack) {
        c.window.start_frame = c.data_from;
        c.window.end_frame = c.data_from + c.duration_frames;
        c.accounted_through = c.data_from - 1;
        c.record.established_frame = frame;
      }
      if (tx.ack.is_nack) {
        apply(LinkEvent::nack_received);
        start_recovery(LinkPhase::reestablish_data_only, frame, nodes);
      } else {
        apply(LinkEvent::ack_received);
      }
      break;

    case TxKind::probe:
      break;
  }
}

void Link::on_probe_result(std::int64_t frame, int is, NodeId prober, bool blocked,
                           std::span<NodeState> nodes) {
  if (!call_ || is_absorbing(call_->ctx.phase)) return;
  auto& c = *call_;
  const auto state = blocked ? ProbeState::blocked : ProbeState::clear;

  if (prober == source_) {
    if (c.ctx.phase == LinkPhase::await_block_data && is == c.probe_is) {
      if (blocked) {
        c.excluded.set(static_cast<std::size_t>(is));
        c.select_after = frame;
        apply(LinkEvent::probe_blocked);
        return;
      }
      apply(LinkEvent::probe_clear);
      SlotSet excluded = nodes[source_].transmit_slots();
      excluded.set(static_cast<std::size_t>(is));
      const IsCandidates m = lowest_interference_slots(nodes[source_].interference, excluded, 1);
      c.ctx.data_is = is;
      c.ctx.ack_is = m.slots[0];
      c.ctx.candidate_ack_is = m;
      auto& src = nodes[source_].schedule;
      src[static_cast<std::size_t>(is)] = SlotRole::tx_data;
      src[static_cast<std::size_t>(m.slots[0])] = SlotRole::rx_ack;
      c.data_from = frame + 2;
      plan(frame + 1, is, TxKind::request, true, m);
    } else if (c.recovery) {
      auto& rec = *c.recovery;
      for (std::size_t j = 0; j < 2; ++j)
        if (rec.data.slots[j] == is && rec.data_probe[j] == ProbeState::pending)
          rec.data_probe[j] = state;
    }
    return;
  }

  if (prober != destination_) return;
  if (c.ctx.phase == LinkPhase::await_ack && is == c.dest_ack_probe) {
    c.dest_ack_probe = -1;
    if (blocked) {
      // No NACK at setup: the source times out waiting for the ACK.
      release_destination(nodes);
    } else {
      auto& dst = nodes[destination_].schedule;
      dst[static_cast<std::size_t>(c.ctx.data_is)] = SlotRole::rx_data;
      dst[static_cast<std::size_t>(is)] = SlotRole::tx_ack;
      c.dest_bound = true;
    }
  } else if (c.recovery && c.ctx.phase == LinkPhase::reestablish_both) {
    auto& rec = *c.recovery;
    bool pending = false;
    for (std::size_t j = 0; j < 2; ++j) {
      if (rec.ack.slots[j] == is && rec.ack_probe[j] == ProbeState::pending) rec.ack_probe[j] = state;
      pending = pending || rec.ack_probe[j] == ProbeState::pending;
    }
    if (!pending) resolve_ack_probes(frame, nodes);
  }
}

void Link::resolve_ack_probes(std::int64_t /*frame*/, std::span<NodeState> nodes) {
  auto& c = *call_;
  auto& rec = *c.recovery;
  for (std::size_t j = 0; j < 2; ++j) {
    if (rec.ack_probe[j] != ProbeState::clear) continue;
    bind(nodes, rec.new_data_is, rec.ack.slots[j], rec.started + 3);
    ++c.record.switches;
    c.ctx.candidate_ack_is = rec.ack;
    c.recovery.reset();
    apply(LinkEvent::rebound);
    return;
  }
  apply(LinkEvent::candidates_blocked);
}

void Link::on_slot_end(std::int64_t frame, int is, std::span<NodeState> nodes) {
  if (!call_ || is_absorbing(call_->ctx.phase)) return;
  auto& c = *call_;

  // Destination acknowledges every DATA slot of its binding, NACK on a miss.
  if (c.dest_bound && is == c.ctx.data_is && c.data_from >= 0 && frame >= c.data_from &&
      (c.ctx.phase == LinkPhase::active ||
       (c.ctx.phase == LinkPhase::await_ack && frame == c.data_from))) {
    const int m = c.ctx.ack_is;
    plan(m > is ? frame : frame + 1, m, TxKind::ack, false, {}, c.last_ok != frame);
  }

  if (c.expected_ack_frame == frame && is == c.ctx.ack_is && c.ack_seen_frame != frame) {
    c.expected_ack_frame = -1;
    if (c.ctx.phase == LinkPhase::await_ack) {
      fail_setup_attempt(frame, nodes);
    } else if (c.ctx.phase == LinkPhase::active) {
      apply(LinkEvent::ack_missing);
      start_recovery(LinkPhase::reestablish_both, frame, nodes);
    }
  }
}

void Link::fail_setup_attempt(std::int64_t frame, std::span<NodeState> nodes) {
  auto& c = *call_;
  const int failed = c.ctx.data_is;
  ++c.ctx.attempts;
  c.record.attempts = c.ctx.attempts;
  release_source(nodes);
  release_destination(nodes);
  planned_.clear();
  c.ctx.data_is = -1;
  c.ctx.ack_is = -1;
  c.data_from = -1;
  c.dest_ack_probe = -1;
  if (c.ctx.attempts >= params_.max_attempts) {
    apply(LinkEvent::attempts_exhausted);
    return;
  }
  apply(LinkEvent::ack_missing);
  c.excluded.reset();
  if (failed >= 0) c.excluded.set(static_cast<std::size_t>(failed));
  c.select_after = frame;
}

void Link::start_recovery(LinkPhase kind, std::int64_t frame, std::span<NodeState> nodes) {
  auto& c = *call_;
  Recovery rec;
  rec.started = frame;
  ++c.record.recoveries;
  rec.data = c.ctx.candidate_data_is;

  auto& src = nodes[source_].schedule;
  auto& dst = nodes[destination_].schedule;
  if (c.ctx.data_is >= 0) {
    src[static_cast<std::size_t>(c.ctx.data_is)] = SlotRole::idle;
    dst[static_cast<std::size_t>(c.ctx.data_is)] = SlotRole::idle;
  }
  if (kind == LinkPhase::reestablish_both) {
    release_source(nodes);
    release_destination(nodes);
    c.ctx.ack_is = -1;
  }
  c.ctx.data_is = -1;
  c.dest_bound = false;
  c.data_from = -1;
  c.expected_ack_frame = -1;
  planned_.clear();

  for (std::size_t j = 0; j < 2; ++j) {
    const int cand = rec.data.slots[j];
    if (cand < 0) continue;
    rec.data_probe[j] = ProbeState::pending;
    plan(frame + 1, cand, TxKind::probe, true);
  }
  c.recovery = rec;
  if (rec.data.empty()) apply(LinkEvent::candidates_blocked);
}

void Link::finish_recovery_probes(std::int64_t frame, std::span<NodeState> nodes) {
  auto& c = *call_;
  auto& rec = *c.recovery;
  SlotSet clear;
  for (std::size_t j = 0; j < 2; ++j)
    if (rec.data_probe[j] == ProbeState::clear) clear.set(static_cast<std::size_t>(rec.data.slots[j]));
  if (clear.none()) {
    apply(LinkEvent::candidates_blocked);
    return;
  }

  IsCandidates ack;
  if (c.ctx.phase == LinkPhase::reestablish_both) {
    const NodeState& src = nodes[source_];
    ack = lowest_interference_slots(src.interference, clear | src.transmit_slots(), 2);
  } else {
    ack.slots[0] = c.ctx.ack_is;
  }
  c.ctx.candidate_ack_is = ack;
  for (std::size_t j = 0; j < 2; ++j)
    if (rec.data_probe[j] == ProbeState::clear)
      plan(frame + 1, rec.data.slots[j], TxKind::request, true, ack);
}

void Link::account(std::int64_t through, FrameReport& report) {
  auto& c = *call_;
  for (std::int64_t f = c.accounted_through + 1; f <= through; ++f) {
    if (f < c.window.start_frame || f >= c.window.end_frame) continue;
    ++report.generated;
    ++c.record.frames_generated;
    if (f == c.last_ok || f == c.prev_ok) {
      ++report.delivered;
    } else {
      ++report.lost;
      ++c.record.frames_lost;
      ++c.ctx.frames_lost;
    }
  }
  c.accounted_through = std::max(c.accounted_through, through);
}

FrameReport Link::on_frame_end(std::int64_t frame, std::span<NodeState> nodes) {
  FrameReport report;
  if (!call_) return report;
  auto& c = *call_;

  if (c.ctx.phase == LinkPhase::select_data_is && frame >= c.select_after) {
    const NodeState& src = nodes[source_];
    const auto k = select_data_is(src.interference,
                                  src.slots_with_code(nodes[destination_].tx_code()), c.excluded);
    if (!k) {
      apply(LinkEvent::no_eligible_is);
    } else {
      c.probe_is = *k;
      plan(frame + 1, *k, TxKind::probe, true);
      apply(LinkEvent::selection_made);
    }
  } else if (c.recovery && (c.ctx.phase == LinkPhase::reestablish_both ||
                            c.ctx.phase == LinkPhase::reestablish_data_only)) {
    if (frame == c.recovery->started + 1) {
      finish_recovery_probes(frame, nodes);
    } else if (frame == c.recovery->started + 2 && c.recovery->new_data_is < 0) {
      apply(LinkEvent::request_lost);
    }
  }

  if (established()) account(frame, report);

  if (c.ctx.phase == LinkPhase::dropped || c.ctx.phase == LinkPhase::blocked) {
    release_source(nodes);
    release_destination(nodes);
    CallRecord rec = c.record;
    rec.end_frame = frame;
    rec.outcome = c.ctx.phase == LinkPhase::dropped ? CallOutcome::dropped : CallOutcome::blocked;
    report.finished = rec;
    call_.reset();
    planned_.clear();
  }
  return report;
}

}  // namespace pbmac
