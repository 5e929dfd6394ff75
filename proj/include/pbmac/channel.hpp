#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace pbmac {

using NodeId = std::uint32_t;

struct Position {
  double x = 0.0;  // meters
  double y = 0.0;  // meters
};

double distance(Position a, Position b);

/// Log-normal shadowing of one unordered node pair, advanced as a
/// first-order autoregressive process once per frame.
struct ShadowState {
  double value_db = 0.0;
  double epsilon = 0.0;  // frame-to-frame correlation, in [0, 1]
  double sigma_db = 4.0;
};

/// Deterministic distance attenuation, clamped to unity gain below 1 m.
double path_loss(double distance_m, double beta);

/// One AR(1) step: epsilon * value + sqrt(1 - epsilon^2) * sigma * draw.
/// `draw` is a standard normal sample. epsilon == 1 freezes the state.
ShadowState step_shadowing(const ShadowState& state, double draw);

/// Correlation coefficient between consecutive frames for a node moving
/// at `speed_mps`, with exponential decorrelation over `corr_distance_m`.
double shadow_correlation(double speed_mps, double frame_s, double corr_distance_m);

/// Symmetric pairwise linear power gains. Each unordered pair {i, j} owns a
/// single stored gain and a single shadow state, so g_ij == g_ji exactly.
class ChannelMatrix {
 public:
  ChannelMatrix() = default;
  ChannelMatrix(std::size_t nodes, double beta);

  std::size_t nodes() const { return nodes_; }
  std::size_t pairs() const { return gains_.size(); }
  double beta() const { return beta_; }

  // Packed upper-triangle index; a != b.
  std::size_t pair_index(NodeId a, NodeId b) const {
    if (a > b) std::swap(a, b);
    return static_cast<std::size_t>(a) * (2 * nodes_ - a - 1) / 2 + (b - a - 1);
  }

  double gain(NodeId a, NodeId b) const { return gains_[pair_index(a, b)]; }

  ShadowState& shadow(NodeId a, NodeId b) { return shadows_[pair_index(a, b)]; }
  const ShadowState& shadow(NodeId a, NodeId b) const { return shadows_[pair_index(a, b)]; }

  NodeId first(std::size_t pair) const { return first_[pair]; }
  NodeId second(std::size_t pair) const { return second_[pair]; }

  std::span<double> gains() { return gains_; }
  std::span<const double> gains() const { return gains_; }
  std::span<ShadowState> shadows() { return shadows_; }
  std::span<const ShadowState> shadows() const { return shadows_; }

 private:
  std::size_t nodes_ = 0;
  double beta_ = 2.4;
  std::vector<double> gains_;
  std::vector<ShadowState> shadows_;
  std::vector<NodeId> first_;
  std::vector<NodeId> second_;
};

// Per-pair kernels. Each takes the list of pair indices to touch; the
// serial and parallel variants perform identical floating-point operations
// per element and produce bit-identical matrices.

/// Recomputes gain = path_loss(d) * 10^(shadow/10) for the listed pairs.
void refresh_gains_serial(std::span<const Position> positions, ChannelMatrix& channel,
                          std::span<const std::size_t> pairs);
void refresh_gains_parallel(std::span<const Position> positions, ChannelMatrix& channel,
                            std::span<const std::size_t> pairs);

/// Advances the shadow state of the listed pairs; draws[i] feeds pairs[i].
void advance_shadowing_serial(ChannelMatrix& channel, std::span<const std::size_t> pairs,
                              std::span<const double> draws);
void advance_shadowing_parallel(ChannelMatrix& channel, std::span<const std::size_t> pairs,
                                std::span<const double> draws);

/// Full refresh of every pair.
void refresh_gains(std::span<const Position> positions, ChannelMatrix& channel);

}  // namespace pbmac
