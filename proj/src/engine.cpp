#include "pbmac/engine.hpp"

#include <boost/random/normal_distribution.hpp>

#include <algorithm>
#include <numbers>
#include <random>
#include <stdexcept>

namespace pbmac {

void FrameClock::advance() {
  if (phase == Phase::information) {
    phase = Phase::blocking;
    return;
  }
  phase = Phase::information;
  if (++slot == slots_per_frame) {
    slot = 0;
    ++frame;
  }
}

std::optional<std::size_t> slot_interference(NodeId receiver, std::span<const Transmission> ledger,
                                             const ChannelMatrix& channel,
                                             phy::SlotMeasurement& out) {
  out = {};
  std::optional<std::size_t> desired;
  for (std::size_t i = 0; i < ledger.size(); ++i) {
    const Transmission& tx = ledger[i];
    if (tx.sender == receiver) continue;
    const double p = tx.power * channel.gain(tx.sender, receiver);
    if (tx.target == receiver && tx.kind != TxKind::probe) {
      out.desired_rx += p;
      desired = i;
    } else {
      out.interference += p;
      if (tx.kind == TxKind::probe) out.probe_rx += p;
    }
  }
  return desired;
}

Simulator::Simulator(const SimConfig& config) : Simulator(config, Scenario{}) {}

Simulator::Simulator(const SimConfig& config, Scenario scenario)
    : config_(config),
      scenario_(std::move(scenario)),
      calls_(static_cast<std::size_t>(config.nodes / 2), config.mean_interarrival_s,
             config.mean_duration_s, config.frame_s, config.seed),
      placement_rng_(make_stream(config.seed, 1)),
      shadow_rng_(make_stream(config.seed, 2)),
      mobility_rng_(make_stream(config.seed, 3)) {
  config_.validate();
  phy_ = config_.phy();
  warmup_ = config_.warmup_frames();
  place_nodes();
}

void Simulator::place_nodes() {
  const auto pairs = static_cast<std::size_t>(config_.nodes / 2);
  const auto n = static_cast<std::size_t>(config_.nodes);
  if (!scenario_.sources.empty() &&
      (scenario_.sources.size() != pairs || scenario_.destinations.size() != pairs))
    throw ConfigError("scenario placement must list N/2 sources and N/2 destinations");

  std::uniform_real_distribution<double> coord(0.0, config_.arena_side);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  const double speed = kph_to_mps(config_.velocity_kph);

  positions_.resize(n);
  for (std::size_t p = 0; p < pairs; ++p) {
    Position src;
    Position dst;
    if (scenario_.sources.empty()) {
      src = {coord(placement_rng_), coord(placement_rng_)};
      dst = random_point_in_tether(src, config_.tether_radius, config_.arena_side, placement_rng_);
    } else {
      src = scenario_.sources[p];
      dst = scenario_.destinations[p];
    }
    positions_[2 * p] = src;
    positions_[2 * p + 1] = dst;
    mobility_.push_back(MobilityState{src, dst, angle(placement_rng_), speed,
                                      config_.tether_radius, config_.arena_side});
  }

  nodes_.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    nodes_.emplace_back(static_cast<NodeId>(i), positions_[i], config_.slots);
  for (std::size_t p = 0; p < pairs; ++p)
    links_.emplace_back(p, static_cast<NodeId>(2 * p), static_cast<NodeId>(2 * p + 1),
                        config_.mac());

  channel_ = ChannelMatrix(n, config_.path_loss_exponent);
  const double mobile_eps =
      shadow_correlation(speed, config_.frame_s, config_.shadow_corr_distance);
  boost::random::normal_distribution<double> normal;
  auto shadows = channel_.shadows();
  for (std::size_t p = 0; p < channel_.pairs(); ++p) {
    // Pairs of fixed sources never decorrelate.
    const bool both_fixed = channel_.first(p) % 2 == 0 && channel_.second(p) % 2 == 0;
    ShadowState& s = shadows[p];
    s.sigma_db = config_.shadow_sigma_db;
    s.epsilon = both_fixed ? 1.0 : mobile_eps;
    s.value_db = scenario_.zero_shadowing ? 0.0 : s.sigma_db * normal(shadow_rng_);
    if (!both_fixed && speed > 0.0) mobile_pairs_.push_back(p);
  }
  draws_.resize(mobile_pairs_.size());
  refresh_gains(positions_, channel_);
}

void Simulator::advance_environment() {
  if (config_.velocity_kph <= 0.0) return;
  for (std::size_t p = 0; p < mobility_.size(); ++p) {
    mobility_[p] = step_mobility(mobility_[p], config_.frame_s, mobility_rng_);
    positions_[2 * p + 1] = mobility_[p].position;
    nodes_[2 * p + 1].position = mobility_[p].position;
  }
  boost::random::normal_distribution<double> normal;
  for (auto& d : draws_) d = normal(shadow_rng_);
  advance_shadowing_parallel(channel_, mobile_pairs_, draws_);
  refresh_gains_parallel(positions_, channel_, mobile_pairs_);
}

void Simulator::start_arrivals() {
  if (scenario_.random_arrivals) {
    for (const NewCall& call : calls_.arrivals_for_frame(frame_)) {
      links_[call.source].start_call(frame_, call.duration_frames);
      if (counted(frame_)) ++metrics_.calls_started;
    }
  }
  for (auto it = scenario_.calls.begin(); it != scenario_.calls.end();) {
    if (it->arrival_frame > frame_ || links_.at(it->pair).in_call()) {
      ++it;
      continue;
    }
    links_[it->pair].start_call(frame_, it->duration_frames);
    if (counted(frame_)) ++metrics_.calls_started;
    it = scenario_.calls.erase(it);
  }
}

void Simulator::record_finished(const CallRecord& rec) {
  finished_.push_back(rec);
  if (!counted(rec.arrival_frame)) return;
  switch (*rec.outcome) {
    case CallOutcome::completed: ++metrics_.calls_completed; break;
    case CallOutcome::dropped: ++metrics_.calls_dropped; break;
    case CallOutcome::blocked: ++metrics_.calls_blocked; break;
  }
  metrics_.is_switches += static_cast<std::uint64_t>(rec.switches);
  metrics_.recoveries += static_cast<std::uint64_t>(rec.recoveries);
}

void Simulator::process_slot(int slot) {
  const auto s = static_cast<std::size_t>(slot);
  ledger_.clear();
  for (auto& link : links_) link.emit(frame_, slot, nodes_, ledger_);

  transmitting_.assign(nodes_.size(), 0);
  int probe_count = 0;
  for (const auto& tx : ledger_) {
    if (transmitting_[tx.sender]) throw std::logic_error("node transmits twice in one slot");
    transmitting_[tx.sender] = 1;
    if (tx.kind == TxKind::probe) ++probe_count;
  }
  for (const auto& tx : ledger_)
    if (tx.target != kNoNode && transmitting_[tx.target]) ++metrics_.half_duplex_violations;
  if (probe_count > 0 && counted(frame_)) metrics_.record_probe_slot(probe_count);

  receivers_.clear();
  blockers_.clear();
  for (auto& node : nodes_) {
    // A transmitting node cannot listen; its cache keeps the older value.
    if (transmitting_[node.id]) continue;
    phy::SlotMeasurement m;
    const auto desired = slot_interference(node.id, ledger_, channel_, m);
    node.interference[s] = m.interference;

    auto& codes = node.detected_codes[s];
    codes.clear();
    for (const auto& tx : ledger_) {
      if (tx.kind != TxKind::data && tx.kind != TxKind::ack) continue;
      if (tx.power * channel_.gain(tx.sender, node.id) >= phy_.blocking_threshold)
        codes.push_back(nodes_[tx.sender].tx_code());
    }

    if (!desired && m.probe_rx <= 0.0) continue;
    ReceiverReport r;
    r.node = node.id;
    r.role = node.schedule[s];
    r.measurement = m;
    r.desired = desired;
    r.margin = phy::interference_margin(m.desired_rx, phy_.data_spreading_gain,
                                        m.interference - m.probe_rx, phy_.noise,
                                        phy_.sinr_threshold);
    if (desired) {
      r.decoded = phy::sinr(m.desired_rx, phy_.data_spreading_gain, m.interference, phy_.noise) >=
                  phy_.sinr_threshold;
      if (const auto power = on_probe_received(r.role, m, phy_)) {
        r.blocking_power = *power;
        blockers_.emplace_back(node.id, *power);
      }
    }
    receivers_.push_back(r);
  }

  for (const auto& r : receivers_) {
    if (!r.desired) continue;
    const Transmission& tx = ledger_[*r.desired];
    links_[tx.link].on_reception(frame_, slot, tx, r.decoded, nodes_);
  }

  // Blocking slot: blocking messages add linearly at each prober.
  probes_.clear();
  for (const auto& tx : ledger_) {
    if (tx.kind != TxKind::probe) continue;
    double rx = 0.0;
    for (const auto& [blocker, power] : blockers_) rx += power * channel_.gain(blocker, tx.sender);
    const bool blocked = phy::blocking_detected(rx, phy_.blocking_threshold);
    probes_.push_back({tx.sender, rx, blocked});
    links_[tx.link].on_probe_result(frame_, slot, tx.sender, blocked, nodes_);
  }

  for (auto& link : links_) link.on_slot_end(frame_, slot, nodes_);

  if (observer_)
    observer_->on_slot(SlotView{frame_, slot, ledger_, receivers_, probes_, channel_, phy_});
}

void Simulator::step() {
  for (auto& link : links_) {
    if (auto rec = link.complete_if_due(frame_, nodes_)) {
      record_finished(*rec);
      calls_.call_finished(link.index(), frame_);
    }
  }
  if (frame_ > 0) advance_environment();
  start_arrivals();

  for (int slot = 0; slot < config_.slots; ++slot) process_slot(slot);

  for (auto& link : links_) {
    FrameReport rep = link.on_frame_end(frame_, nodes_);
    if (counted(frame_)) {
      metrics_.frames_generated += static_cast<std::uint64_t>(rep.generated);
      metrics_.frames_delivered += static_cast<std::uint64_t>(rep.delivered);
      metrics_.frames_lost += static_cast<std::uint64_t>(rep.lost);
    }
    if (rep.finished) {
      record_finished(*rep.finished);
      calls_.call_finished(link.index(), frame_ + 1);
    }
  }
  ++frame_;
}

void Simulator::run_frames(std::int64_t frames) {
  for (std::int64_t i = 0; i < frames; ++i) step();
}

MetricsRecord Simulator::run() {
  run_frames(config_.total_frames - frame_);
  return metrics();
}

MetricsRecord Simulator::metrics() const {
  MetricsRecord out = metrics_;
  for (const auto& link : links_) {
    const CallRecord* rec = link.record();
    if (!rec || !counted(rec->arrival_frame)) continue;
    ++out.calls_in_progress;
    out.is_switches += static_cast<std::uint64_t>(rec->switches);
    out.recoveries += static_cast<std::uint64_t>(rec->recoveries);
  }
  return out;
}

MetricsRecord run(const SimConfig& config) { return Simulator(config).run(); }

}  // namespace pbmac
