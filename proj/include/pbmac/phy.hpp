#pragma once

// Power and SINR arithmetic. All powers are in watts, all gains linear.

namespace pbmac::phy {

struct PhyParams {
  double tx_power = 0.1;               // common DATA/ACK/request power
  double probe_fraction = 0.01;        // probe power = probe_fraction * tx_power
  double data_spreading_gain = 32.0;
  double probe_spreading_gain = 3200.0;
  double blocking_threshold = 1e-13;   // detection threshold for the blocking code
  double sinr_threshold = 10.0;        // linear (10 dB)
  double noise = 1e-13;

  double probe_power() const { return probe_fraction * tx_power; }

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

/// Power and interference seen by one node during one information slot.
struct SlotMeasurement {
  double interference = 0.0;  // everything except the desired signal, probes included
  double desired_rx = 0.0;
  double probe_rx = 0.0;      // aggregate common-probe power (subset of interference)
  double blocking_rx = 0.0;
};

double db_to_linear(double db);
double linear_to_db(double linear);

double sinr(double desired_rx, double spreading_gain, double interference, double noise);

/// Extra interference a receiver can absorb before its SINR falls below
/// the threshold. Non-positive when the link is already failing.
double interference_margin(double desired_rx, double spreading_gain, double interference,
                           double noise, double sinr_threshold);

/// Full-power interference a probing sender would add, estimated from the
/// received probe power.
double predict_interference_increase(double probe_rx, double probe_fraction);

/// Transmit power of a blocking message:
///   max(2 * threshold * probe_fraction * P / probe_rx, threshold * P / margin).
/// With reciprocal gains this reaches a single prober at >= 2 * threshold,
/// the stronger of two probers at >= threshold, and the weaker of two at
/// >= threshold whenever its full-power transmission would exceed the margin.
/// Throws std::invalid_argument if probe_rx or margin is not positive.
double blocking_power(double probe_rx, double margin, const PhyParams& params);

/// Inclusive threshold test.
bool blocking_detected(double blocking_rx, double threshold);

/// True iff the predicted increase strictly exceeds the margin.
bool would_block(double probe_rx, double probe_fraction, double margin);

}  // namespace pbmac::phy
