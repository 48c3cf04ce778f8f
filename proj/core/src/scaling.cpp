#include "bouncelab/scaling.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "bouncelab/errors.hpp"

namespace bouncelab {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    std::ostringstream os;
    os << "parameter '" << name << "' must be positive and finite, got " << value;
    throw InvalidParameter(os.str());
  }
}

}  // namespace

void PhysicalParams::validate() const {
  require_positive(mass, "mass");
  require_positive(gravity, "gravity");
  require_positive(hbar, "hbar");
  require_positive(kappa, "kappa");
  if (!(v0 >= 0.0) || !std::isfinite(v0)) throw InvalidParameter("parameter 'v0' must be >= 0");
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw InvalidParameter("parameter 'lambda' must be >= 0");
  if (!(omega >= 0.0) || !std::isfinite(omega))
    throw InvalidParameter("parameter 'omega' must be >= 0");
  if (optical_omega && rabi_eff) {
    const double v0_expected = hbar * *rabi_eff / 4.0;
    const double kappa_expected = 2.0 * *optical_omega / constants::speed_of_light;
    if (v0 != v0_expected || kappa != kappa_expected)
      throw InvalidParameter("v0/kappa inconsistent with optical_omega/rabi_eff");
  }
}

PhysicalParams PhysicalParams::with_optics(double optical_omega_rad_s,
                                           double rabi_eff_rad_s) const {
  PhysicalParams out = *this;
  out.optical_omega = optical_omega_rad_s;
  out.rabi_eff = rabi_eff_rad_s;
  out.v0 = hbar * rabi_eff_rad_s / 4.0;
  out.kappa = 2.0 * optical_omega_rad_s / constants::speed_of_light;
  return out;
}

PhysicalParams PhysicalParams::gravitational() {
  PhysicalParams p;
  p.mass = 1.0;
  p.gravity = 1.0;
  p.hbar = 1.0;
  p.kappa = 1.0;
  p.v0 = 0.0;
  return p;
}

PhysicalParams PhysicalParams::cesium_cavity() {
  PhysicalParams p;
  p.omega = 2.0 * std::numbers::pi * 930.0;
  p.kappa = 0.57e6;
  p.v0 = p.hbar * (2.0 * std::numbers::pi * 23.38e3) / 4.0;
  return p;
}

UnitSystem make_unit_system(const PhysicalParams& params) {
  require_positive(params.mass, "mass");
  require_positive(params.gravity, "gravity");
  require_positive(params.hbar, "hbar");
  const double m = params.mass;
  const double g = params.gravity;
  const double h = params.hbar;
  UnitSystem u;
  u.length = std::cbrt(h * h / (m * m * g));
  u.time = std::cbrt(h / (m * g * g));
  u.energy = std::cbrt(m * g * g * h * h);
  u.mass = m;
  return u;
}

ScaledParams to_scaled(const PhysicalParams& params, const UnitSystem& units) {
  return ScaledParams{params.kappa * units.length, params.v0 / units.energy,
                      params.lambda / units.length, params.omega * units.time};
}

void WavepacketSpec::validate() const {
  if (!(width > 0.0)) throw InvalidParameter("wave packet width must be positive");
  if (!(z0 > 0.0)) throw InvalidParameter("wave packet must start above the mirror (z0 > 0)");
}

double mean_energy(const WavepacketSpec& spec, const PhysicalParams& params) {
  return params.mass * params.gravity * spec.z0 + spec.p0 * spec.p0 / (2.0 * params.mass);
}

double n0_from_z0(const WavepacketSpec& spec, const PhysicalParams& params) {
  spec.validate();
  const UnitSystem u = make_unit_system(params);
  // E = (1/2) (3 pi (n + 3/4))^(2/3) in units of e0
  const double e = mean_energy(spec, params) / u.energy;
  return std::pow(2.0 * e, 1.5) / (3.0 * std::numbers::pi) - 0.75;
}

double lambda_bar(const PhysicalParams& params) {
  return params.lambda * params.omega * params.omega / params.gravity;
}

}  // namespace bouncelab
