#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bouncelab/propagator.hpp"
#include "bouncelab/scaling.hpp"

namespace bouncelab {

// Run configuration: physical parameters, the initial packet and numerics.
// Text form is one `key = value` per line; `#` starts a comment.

struct RunConfig {
  PhysicalParams params = PhysicalParams::cesium_cavity();
  WavepacketSpec packet{20.1e-6, 0.0, 0.28e-6};

  std::size_t grid_points = 4096;
  double z_max = 120e-6;               // m
  std::size_t steps_per_period = 256;  // per driving period
  std::size_t sample_stride = 16;
  std::optional<double> total_time;    // s; default total_time_factor * T0
  double total_time_factor = 1.35;
  WallMode wall = WallMode::hard;
  std::optional<double> wall_rounding;  // m; default max(3 dz, 3 sqrt(dt)) in grid units
  Frame frame = Frame::moving;

  double window_lo = 0.7;  // x T0
  double window_hi = 1.3;
  double prominence = 1.5;
  int fractional_order = 4;

  std::optional<int> resonance_order;
  std::optional<double> secular_r;
  double q_cap = 1e4;
  double stark_guard = 0.05;

  void validate() const;
};

/// Names accepted by set_config_value, in canonical order.
const std::vector<std::string>& config_keys();

/// Throws ConfigError naming the key (line 0 for command-line overrides).
void set_config_value(RunConfig& config, const std::string& key, const std::string& value,
                      int line = 0);

RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

/// Canonical text (every key, fixed precision); equal configs give equal text.
std::string to_text(const RunConfig& config);

}  // namespace bouncelab
