#pragma once

#include <optional>

namespace bouncelab {

namespace constants {
inline constexpr double hbar = 1.054571817e-34;         // J s
inline constexpr double speed_of_light = 299792458.0;   // m/s
inline constexpr double cesium_mass = 2.2069e-25;       // kg (132.905 u)
inline constexpr double standard_gravity = 9.81;        // m/s^2
}  // namespace constants

/// SI description of the atom, gravity and the modulated evanescent mirror.
///
/// `lambda` is the mirror modulation amplitude in metres and may be zero.
/// When both `optical_omega` and `rabi_eff` are present, `v0` and `kappa`
/// are derived from them (V0 = hbar Omega_eff / 4, kappa = 2 omega_L / c).
struct PhysicalParams {
  double mass = constants::cesium_mass;
  double gravity = constants::standard_gravity;
  double kappa = 0.57e6;  // 1/m
  double v0 = 0.0;        // J
  double lambda = 0.0;    // m
  double omega = 0.0;     // rad/s
  std::optional<double> optical_omega;  // rad/s
  std::optional<double> rabi_eff;       // rad/s
  double hbar = constants::hbar;

  /// Throws InvalidParameter if any invariant is violated.
  void validate() const;

  /// Returns a copy with v0 and kappa recomputed from the optical fields.
  PhysicalParams with_optics(double optical_omega_rad_s, double rabi_eff_rad_s) const;

  /// hbar = M = g = 1; handy for checking formulas in natural units.
  static PhysicalParams gravitational();
  /// Cesium, g = 9.81, omega = 2 pi x 0.93 kHz, Omega_eff = 2 pi x 23.38 kHz, kappa = 0.57 / um.
  static PhysicalParams cesium_cavity();
};

/// Gravitational units: length l0, time t0 and energy e0 built from hbar, M, g.
struct UnitSystem {
  double length;  // (hbar^2 / (M^2 g))^(1/3)
  double time;    // (hbar / (M g^2))^(1/3)
  double energy;  // (M g^2 hbar^2)^(1/3)
  double mass;    // M

  double momentum() const { return mass * length / time; }
  double action() const { return energy * time; }
};

UnitSystem make_unit_system(const PhysicalParams& params);

/// Mirror and drive parameters in gravitational units (hbar = M = g = 1).
struct ScaledParams {
  double kappa;
  double v0;
  double lambda;
  double omega;
};

ScaledParams to_scaled(const PhysicalParams& params, const UnitSystem& units);

/// Gaussian initial condition, SI.
struct WavepacketSpec {
  double z0;         // mean height above the mirror (m)
  double p0 = 0.0;   // mean momentum (kg m/s)
  double width;      // spatial standard deviation (m)

  void validate() const;
};

/// Mean energy M g z0 + p0^2 / 2M of the packet (width correction ignored).
double mean_energy(const WavepacketSpec& spec, const PhysicalParams& params);

/// Real quantum number whose semiclassical level matches the packet's mean energy.
double n0_from_z0(const WavepacketSpec& spec, const PhysicalParams& params);

/// Dimensionless drive strength lambda omega^2 / g.
double lambda_bar(const PhysicalParams& params);

}  // namespace bouncelab
