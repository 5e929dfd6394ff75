#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "pbmac/mac.hpp"
#include "pbmac/phy.hpp"

namespace pbmac {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every scenario parameter. In the config file each field is keyed by the
/// name given in its comment.
struct SimConfig {
  int nodes = 20;                      // N (even: N/2 source-destination pairs)
  double velocity_kph = 10.0;          // v_kph
  int slots = 8;                       // M
  double frame_s = 0.020;              // T_frame
  double arena_side = 1000.0;          // arena_side
  double tether_radius = 150.0;        // tether_radius
  double path_loss_exponent = 2.4;     // beta
  double shadow_sigma_db = 4.0;        // sigma_db
  double shadow_corr_distance = 20.0;  // d_corr
  double tx_power = 0.1;               // P
  double probe_fraction = 0.01;        // alpha
  double data_spreading_gain = 32.0;   // G_data
  double probe_spreading_gain = 3200.0;  // G_probe
  double blocking_threshold = 1e-13;   // P_rb_th
  double sinr_threshold_db = 10.0;     // gamma_d_db
  double noise = 1e-13;                // noise
  double mean_interarrival_s = 48.0;   // mean_interarrival
  double mean_duration_s = 30.0;       // mean_duration
  int max_attempts = 3;                // max_attempts
  std::int64_t total_frames = 150000;  // total_frames
  std::uint64_t seed = 1;              // seed
  double warmup_fraction = 0.1;        // warmup_fraction

  /// Throws ConfigError naming the offending key.
  void validate() const;

  phy::PhyParams phy() const;
  MacParams mac() const;
  std::int64_t warmup_frames() const;
};

/// Parses flat `key = value` text ('#' starts a comment). Keys absent from
/// the text keep their defaults; unknown keys and malformed lines throw
/// ConfigError with the line number.
SimConfig parse_config(std::string_view text);
SimConfig load_config(const std::filesystem::path& path);

/// Every key, in a fixed order, with values that parse back exactly.
std::string format_config(const SimConfig& config);
void save_config(const SimConfig& config, const std::filesystem::path& path);

}  // namespace pbmac
