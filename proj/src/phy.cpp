#include "pbmac/phy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pbmac::phy {

void PhyParams::validate() const {
  if (!(tx_power > 0.0)) throw std::invalid_argument("tx power must be positive");
  if (!(probe_fraction > 0.0 && probe_fraction < 1.0))
    throw std::invalid_argument("probe fraction must lie in (0, 1)");
  if (!(data_spreading_gain >= 1.0)) throw std::invalid_argument("data spreading gain must be >= 1");
  if (!(probe_spreading_gain >= data_spreading_gain))
    throw std::invalid_argument("probe spreading gain must be >= data spreading gain");
  if (!(blocking_threshold > 0.0)) throw std::invalid_argument("blocking threshold must be positive");
  if (!(sinr_threshold > 0.0)) throw std::invalid_argument("SINR threshold must be positive");
  if (!(noise > 0.0)) throw std::invalid_argument("noise must be positive");
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

double sinr(double desired_rx, double spreading_gain, double interference, double noise) {
  return spreading_gain * desired_rx / (interference + noise);
}

double interference_margin(double desired_rx, double spreading_gain, double interference,
                           double noise, double sinr_threshold) {
  return spreading_gain * desired_rx / sinr_threshold - (interference + noise);
}

double predict_interference_increase(double probe_rx, double probe_fraction) {
  return probe_rx / probe_fraction;
}

double blocking_power(double probe_rx, double margin, const PhyParams& params) {
  if (!(probe_rx > 0.0)) throw std::invalid_argument("blocking_power: probe power must be positive");
  if (!(margin > 0.0)) throw std::invalid_argument("blocking_power: margin must be positive");
  const double th = params.blocking_threshold;
  const double p = params.tx_power;
  return std::max(2.0 * th * params.probe_fraction * p / probe_rx, th * p / margin);
}

bool blocking_detected(double blocking_rx, double threshold) { return blocking_rx >= threshold; }

bool would_block(double probe_rx, double probe_fraction, double margin) {
  if (probe_rx <= 0.0) return false;
  return predict_interference_increase(probe_rx, probe_fraction) > margin;
}

}  // namespace pbmac::phy
