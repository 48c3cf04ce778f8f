#include "bouncelab/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "bouncelab/errors.hpp"

namespace bouncelab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value, int line) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out))
    throw ConfigError("key '" + key + "': '" + value + "' is not a finite number", key, line);
  return out;
}

long to_integer(const std::string& key, const std::string& value, int line) {
  long out = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end)
    throw ConfigError("key '" + key + "': '" + value + "' is not an integer", key, line);
  return out;
}

double positive(const std::string& key, double v, int line) {
  if (!(v > 0.0)) throw ConfigError("key '" + key + "' must be positive", key, line);
  return v;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "mass_kg",          "gravity_m_s2",      "hbar_J_s",       "kappa_per_m",
      "v0_J",             "rabi_eff_hz",       "optical_omega_rad_s", "lambda_m",
      "lambda_bar",       "omega_rad_s",       "drive_hz",       "z0_m",
      "p0_kg_m_s",        "dz_m",              "grid_points",    "z_max_m",
      "steps_per_period", "sample_stride",     "total_time_s",   "total_time_factor",
      "wall",             "wall_rounding_m",   "frame",             "window_lo",      "window_hi",
      "prominence",       "fractional_order",  "resonance_order", "secular_r",
      "q_cap",            "stark_guard"};
  return keys;
}

void set_config_value(RunConfig& c, const std::string& key, const std::string& raw, int line) {
  const std::string value = trim(raw);
  auto num = [&] { return to_double(key, value, line); };
  auto pos = [&] { return positive(key, num(), line); };
  auto count = [&] {
    const long v = to_integer(key, value, line);
    if (v < 1) throw ConfigError("key '" + key + "' must be >= 1", key, line);
    return static_cast<std::size_t>(v);
  };
  auto& p = c.params;
  if (key == "mass_kg") p.mass = pos();
  else if (key == "gravity_m_s2") p.gravity = pos();
  else if (key == "hbar_J_s") p.hbar = pos();
  else if (key == "kappa_per_m") p.kappa = pos();
  else if (key == "v0_J") {
    p.v0 = num();
    if (p.v0 < 0.0) throw ConfigError("key 'v0_J' must be >= 0", key, line);
  } else if (key == "rabi_eff_hz") {
    // V0 = hbar Omega_eff / 4 with Omega_eff = 2 pi f
    p.rabi_eff = 2.0 * std::numbers::pi * pos();
    p.v0 = p.hbar * *p.rabi_eff / 4.0;
  } else if (key == "optical_omega_rad_s") {
    p.optical_omega = pos();
    p.kappa = 2.0 * *p.optical_omega / constants::speed_of_light;
  } else if (key == "lambda_m") {
    p.lambda = num();
    if (p.lambda < 0.0) throw ConfigError("key 'lambda_m' must be >= 0", key, line);
  } else if (key == "lambda_bar") {
    const double lb = num();
    if (lb < 0.0) throw ConfigError("key 'lambda_bar' must be >= 0", key, line);
    if (!(p.omega > 0.0))
      throw ConfigError("key 'lambda_bar' needs omega set first", key, line);
    p.lambda = lb * p.gravity / (p.omega * p.omega);
  } else if (key == "omega_rad_s") p.omega = pos();
  else if (key == "drive_hz") p.omega = 2.0 * std::numbers::pi * pos();
  else if (key == "z0_m") c.packet.z0 = pos();
  else if (key == "p0_kg_m_s") c.packet.p0 = num();
  else if (key == "dz_m") c.packet.width = pos();
  else if (key == "grid_points") {
    const std::size_t n = count();
    if (n < 2 || (n & (n - 1)) != 0)
      throw ConfigError("key 'grid_points' must be a power of two", key, line);
    c.grid_points = n;
  } else if (key == "z_max_m") c.z_max = pos();
  else if (key == "steps_per_period") c.steps_per_period = count();
  else if (key == "sample_stride") c.sample_stride = count();
  else if (key == "total_time_s") c.total_time = pos();
  else if (key == "total_time_factor") c.total_time_factor = pos();
  else if (key == "wall") {
    if (value == "hard") c.wall = WallMode::hard;
    else if (value == "exponential") c.wall = WallMode::exponential;
    else throw ConfigError("key 'wall' must be 'hard' or 'exponential'", key, line);
  } else if (key == "wall_rounding_m") {
    if (value == "auto") c.wall_rounding.reset();
    else c.wall_rounding = pos();
  } else if (key == "frame") {
    if (value == "moving") c.frame = Frame::moving;
    else if (value == "lab") c.frame = Frame::lab;
    else throw ConfigError("key 'frame' must be 'moving' or 'lab'", key, line);
  } else if (key == "window_lo") c.window_lo = pos();
  else if (key == "window_hi") c.window_hi = pos();
  else if (key == "prominence") c.prominence = pos();
  else if (key == "fractional_order") c.fractional_order = static_cast<int>(count());
  else if (key == "resonance_order") {
    if (value == "auto") c.resonance_order.reset();
    else c.resonance_order = static_cast<int>(count());
  } else if (key == "secular_r") {
    if (value == "auto") c.secular_r.reset();
    else c.secular_r = pos();
  } else if (key == "q_cap") c.q_cap = pos();
  else if (key == "stark_guard") c.stark_guard = pos();
  else throw ConfigError("unknown key '" + key + "'", key, line);
}

void RunConfig::validate() const {
  try {
    params.validate();
    packet.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what(), "", 0);
  }
  if (!(params.omega > 0.0)) throw ConfigError("omega_rad_s must be set", "omega_rad_s", 0);
  if (!(window_lo < window_hi))
    throw ConfigError("window_lo must be below window_hi", "window_lo", 0);
  if (!(z_max > packet.z0)) throw ConfigError("z_max_m must exceed z0_m", "z_max_m", 0);
}

RunConfig parse_config(std::istream& in) {
  RunConfig c;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream os;
      os << "line " << line_no << ": expected 'key = value'";
      throw ConfigError(os.str(), trim(line), line_no);
    }
    const std::string key = trim(line.substr(0, eq));
    try {
      set_config_value(c, key, line.substr(eq + 1), line_no);
    } catch (const ConfigError& e) {
      std::ostringstream os;
      os << "line " << line_no << ": " << e.what();
      throw ConfigError(os.str(), key, line_no);
    }
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'", "", 0);
  return parse_config(in);
}

std::string to_text(const RunConfig& c) {
  std::ostringstream os;
  os << std::setprecision(17);
  const auto& p = c.params;
  os << "mass_kg = " << p.mass << '\n'
     << "gravity_m_s2 = " << p.gravity << '\n'
     << "hbar_J_s = " << p.hbar << '\n'
     << "kappa_per_m = " << p.kappa << '\n'
     << "v0_J = " << p.v0 << '\n'
     << "lambda_m = " << p.lambda << '\n'
     << "omega_rad_s = " << p.omega << '\n'
     << "z0_m = " << c.packet.z0 << '\n'
     << "p0_kg_m_s = " << c.packet.p0 << '\n'
     << "dz_m = " << c.packet.width << '\n'
     << "grid_points = " << c.grid_points << '\n'
     << "z_max_m = " << c.z_max << '\n'
     << "steps_per_period = " << c.steps_per_period << '\n'
     << "sample_stride = " << c.sample_stride << '\n';
  if (c.total_time) os << "total_time_s = " << *c.total_time << '\n';
  os << "total_time_factor = " << c.total_time_factor << '\n'
     << "wall = " << to_string(c.wall) << '\n'
     << "wall_rounding_m = ";
  if (c.wall_rounding) os << *c.wall_rounding; else os << "auto";
  os << '\n'
     << "frame = " << to_string(c.frame) << '\n'
     << "window_lo = " << c.window_lo << '\n'
     << "window_hi = " << c.window_hi << '\n'
     << "prominence = " << c.prominence << '\n'
     << "fractional_order = " << c.fractional_order << '\n'
     << "resonance_order = ";
  if (c.resonance_order) os << *c.resonance_order; else os << "auto";
  os << "\nsecular_r = ";
  if (c.secular_r) os << *c.secular_r; else os << "auto";
  os << "\nq_cap = " << c.q_cap << '\n' << "stark_guard = " << c.stark_guard << '\n';
  return os.str();
}

}  // namespace bouncelab
