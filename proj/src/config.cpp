#include "pbmac/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

namespace pbmac {

namespace {

struct Field {
  const char* key;
  std::function<void(SimConfig&, std::string_view)> set;
  std::function<std::string(const SimConfig&)> get;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end)
    throw ConfigError("bad value '" + std::string(text) + "' for key '" + std::string(key) + "'");
  return value;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T, typename Member>
Field field(const char* key, Member member) {
  return Field{
      key,
      [key, member](SimConfig& c, std::string_view text) { c.*member = parse_number<T>(key, text); },
      [member](const SimConfig& c) {
        if constexpr (std::is_floating_point_v<T>) {
          return format_double(c.*member);
        } else {
          return std::to_string(c.*member);
        }
      }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      field<int>("N", &SimConfig::nodes),
      field<double>("v_kph", &SimConfig::velocity_kph),
      field<int>("M", &SimConfig::slots),
      field<double>("T_frame", &SimConfig::frame_s),
      field<double>("arena_side", &SimConfig::arena_side),
      field<double>("tether_radius", &SimConfig::tether_radius),
      field<double>("beta", &SimConfig::path_loss_exponent),
      field<double>("sigma_db", &SimConfig::shadow_sigma_db),
      field<double>("d_corr", &SimConfig::shadow_corr_distance),
      field<double>("P", &SimConfig::tx_power),
      field<double>("alpha", &SimConfig::probe_fraction),
      field<double>("G_data", &SimConfig::data_spreading_gain),
      field<double>("G_probe", &SimConfig::probe_spreading_gain),
      field<double>("P_rb_th", &SimConfig::blocking_threshold),
      field<double>("gamma_d_db", &SimConfig::sinr_threshold_db),
      field<double>("noise", &SimConfig::noise),
      field<double>("mean_interarrival", &SimConfig::mean_interarrival_s),
      field<double>("mean_duration", &SimConfig::mean_duration_s),
      field<int>("max_attempts", &SimConfig::max_attempts),
      field<std::int64_t>("total_frames", &SimConfig::total_frames),
      field<std::uint64_t>("seed", &SimConfig::seed),
      field<double>("warmup_fraction", &SimConfig::warmup_fraction),
  };
  return table;
}

void require(bool ok, const char* key, const char* what) {
  if (!ok) throw ConfigError(std::string("invalid '") + key + "': " + what);
}

}  // namespace

void SimConfig::validate() const {
  require(nodes >= 2 && nodes % 2 == 0, "N", "must be even and >= 2");
  require(velocity_kph >= 0.0 && std::isfinite(velocity_kph), "v_kph", "must be >= 0");
  require(slots >= 2 && slots <= kMaxSlots, "M", "must lie in [2, 64]");
  require(frame_s > 0.0, "T_frame", "must be positive");
  require(arena_side > 0.0, "arena_side", "must be positive");
  require(tether_radius > 0.0, "tether_radius", "must be positive");
  require(path_loss_exponent > 0.0, "beta", "must be positive");
  require(shadow_sigma_db >= 0.0, "sigma_db", "must be >= 0");
  require(shadow_corr_distance > 0.0, "d_corr", "must be positive");
  require(tx_power > 0.0, "P", "must be positive");
  require(probe_fraction > 0.0 && probe_fraction < 1.0, "alpha", "must lie in (0, 1)");
  require(data_spreading_gain >= 1.0, "G_data", "must be >= 1");
  require(probe_spreading_gain >= data_spreading_gain, "G_probe", "must be >= G_data");
  require(blocking_threshold > 0.0, "P_rb_th", "must be positive");
  require(std::isfinite(sinr_threshold_db), "gamma_d_db", "must be finite");
  require(noise > 0.0, "noise", "must be positive");
  require(mean_interarrival_s > 0.0, "mean_interarrival", "must be positive");
  require(mean_duration_s > 0.0, "mean_duration", "must be positive");
  require(max_attempts >= 1, "max_attempts", "must be >= 1");
  require(total_frames >= 1, "total_frames", "must be >= 1");
  require(warmup_fraction >= 0.0 && warmup_fraction < 1.0, "warmup_fraction", "must lie in [0, 1)");
}

phy::PhyParams SimConfig::phy() const {
  phy::PhyParams p;
  p.tx_power = tx_power;
  p.probe_fraction = probe_fraction;
  p.data_spreading_gain = data_spreading_gain;
  p.probe_spreading_gain = probe_spreading_gain;
  p.blocking_threshold = blocking_threshold;
  p.sinr_threshold = phy::db_to_linear(sinr_threshold_db);
  p.noise = noise;
  return p;
}

MacParams SimConfig::mac() const {
  return MacParams{slots, max_attempts, tx_power, probe_fraction * tx_power};
}

std::int64_t SimConfig::warmup_frames() const {
  return static_cast<std::int64_t>(std::floor(warmup_fraction * static_cast<double>(total_frames)));
}

SimConfig parse_config(std::string_view text) {
  SimConfig config;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");

    const auto& table = fields();
    const auto it = std::find_if(table.begin(), table.end(),
                                 [&](const Field& f) { return key == f.key; });
    if (it == table.end())
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
    try {
      it->set(config, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return config;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const SimConfig& config) {
  std::string out;
  for (const auto& f : fields()) {
    out += f.key;
    out += " = ";
    out += f.get(config);
    out += '\n';
  }
  return out;
}

void save_config(const SimConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config file '" + path.string() + "'");
  out << format_config(config);
}

}  // namespace pbmac
