#include "bouncelab/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bouncelab/errors.hpp"
#include "bouncelab/spectrum.hpp"

namespace bouncelab {

namespace {

constexpr double pi = std::numbers::pi;

void check_level(double n, const PhysicalParams& params, const StarkOptions& options) {
  params.validate();
  if (n < options.n_min) {
    std::ostringstream os;
    os << "n = " << n << " is below n_min = " << options.n_min
       << " where the correspondence matrix elements are trusted";
    throw DomainError(os.str());
  }
  if (!(params.omega > 0.0)) throw InvalidParameter("Stark shift needs a driving frequency > 0");
}

void flag_resonance(StarkShiftResult& result, int m, double detuning, double n,
                    const StarkOptions& options) {
  if (std::abs(detuning) >= options.guard) return;
  result.near_resonant.push_back(m);
  if (options.strict) {
    std::ostringstream os;
    os << "level n = " << n << " is within the resonance guard of m = " << m
       << " (|1 - (Omega_n/m)^2| = " << std::abs(detuning) << " < " << options.guard << ")";
    throw NearResonance(os.str(), m);
  }
}

// (1 + (2/3)/(1-u)) / (1-u) and its first two u-derivatives.
struct OscillatorWeight {
  double h, dh, d2h;
};

OscillatorWeight oscillator_weight(double u) {
  const double v = 1.0 - u;
  return {(5.0 / 3.0 - u) / (v * v), (7.0 / 3.0 - u) / (v * v * v), (6.0 - 2.0 * u) / (v * v * v * v)};
}

double drive_prefactor(const PhysicalParams& p) {
  const double lb = p.lambda * p.omega * p.omega / p.gravity;
  return lb * lb;
}

}  // namespace

double omega_ratio(double n, const PhysicalParams& params) {
  return 3.0 * (n + 0.75) * params.hbar * params.omega / (2.0 * energy_semiclassical(n, params));
}

StarkShiftResult stark_shift_direct(double n, const PhysicalParams& params,
                                    const StarkOptions& options) {
  check_level(n, params, options);
  StarkShiftResult result;
  result.omega_n = omega_ratio(n, params);
  const double en = energy_semiclassical(n, params);
  const double hw = params.hbar * params.omega;
  const int m_down = static_cast<int>(std::floor(n));  // lowest level is n + m = n - floor(n) >= 0

  auto term = [&](int m) {
    const double z = matrix_element_bohr(n, m, params);
    const double d = en - energy_semiclassical(n + m, params);
    const double denom = d * d - hw * hw;
    flag_resonance(result, m, denom / (d * d), n, options);
    return 2.0 * z * z * d / denom;
  };

  // The summand falls off as |m|^-5 for |m| << n and no slower than
  // |m|^-8/3 beyond, so t(M) M / (5/3) majorises the discarded tail.
  constexpr double tail_exponent = 8.0 / 3.0;
  double sum = 0.0;
  int done = 0;
  int m_max = 16;
  double bound = 0.0;
  while (true) {
    for (int m = done + 1; m <= m_max; ++m) {
      sum += term(m);
      if (m <= m_down) sum += term(-m);
    }
    done = m_max;
    const double last = std::abs(term(m_max)) + (m_max < m_down ? std::abs(term(-m_max)) : 0.0);
    bound = last * m_max / (tail_exponent - 1.0);
    if (bound <= options.relative_tol * std::abs(sum) || m_max >= options.m_cap) break;
    m_max = std::min(2 * m_max, options.m_cap);
  }
  const double scale = std::pow(params.mass * params.lambda * params.omega * params.omega, 2) / 4.0;
  result.shift = scale * sum;
  result.m_max = m_max;
  result.remainder_bound = scale * bound;
  result.converged = bound <= options.relative_tol * std::abs(sum);
  std::sort(result.near_resonant.begin(), result.near_resonant.end());
  result.near_resonant.erase(std::unique(result.near_resonant.begin(), result.near_resonant.end()),
                             result.near_resonant.end());
  return result;
}

StarkShiftResult stark_shift_semiclassical(double n, const PhysicalParams& params,
                                           const StarkOptions& options) {
  check_level(n, params, options);
  StarkShiftResult result;
  const double omega_n = omega_ratio(n, params);
  result.omega_n = omega_n;
  auto term = [&](int m) {
    const double u = (omega_n / m) * (omega_n / m);
    flag_resonance(result, m, 1.0 - u, n, options);
    return oscillator_weight(u).h / std::pow(double(m), 4);
  };
  double sum = 0.0;
  int done = 0;
  int m_max = std::max(16, 2 * static_cast<int>(std::ceil(omega_n)));
  double bound = 0.0;
  while (true) {
    for (int m = done + 1; m <= m_max; ++m) sum += term(m);
    done = m_max;
    // beyond the last resonance the weight decreases monotonically to 5/3
    const double u = std::pow(omega_n / (m_max + 1), 2);
    bound = (u < 1.0 ? oscillator_weight(u).h : 0.0) / (3.0 * std::pow(double(m_max), 3));
    if (bound <= options.relative_tol * std::abs(sum) || m_max >= options.m_cap) break;
    m_max = std::min(2 * m_max, options.m_cap);
  }
  const double scale = drive_prefactor(params) * 3.0 * energy_semiclassical(n, params) / std::pow(pi, 4);
  result.shift = -scale * sum;
  result.m_max = m_max;
  result.remainder_bound = scale * bound;
  result.converged = bound <= options.relative_tol * std::abs(sum);
  return result;
}

PerturbativeRevival revival_time_perturbative(double n0, const PhysicalParams& params,
                                              const StarkOptions& options) {
  auto quasi = [&](double n) {
    return energy_semiclassical(n, params) + stark_shift_semiclassical(n, params, options).shift;
  };
  const double f_m2 = quasi(n0 - 2), f_m1 = quasi(n0 - 1), f_0 = quasi(n0);
  const double f_p1 = quasi(n0 + 1), f_p2 = quasi(n0 + 2);
  const double curvature = (-f_p2 + 16.0 * f_p1 - 30.0 * f_0 + 16.0 * f_m1 - f_m2) / 12.0;
  if (!(curvature < 0.0) && !(curvature > 0.0))
    throw NumericalError("quasi-energy curvature vanished; revival time is undefined");

  PerturbativeRevival out;
  const double e2 = energy_semiclassical_curvature(n0, params);
  out.t0 = 4.0 * pi * params.hbar / std::abs(e2);
  out.curvature = curvature;
  out.estimate.method = RevivalMethod::perturbative;
  out.estimate.time = 4.0 * pi * params.hbar / std::abs(curvature);
  // Stencil error of the five-point rule is O(h^4 f^(6)); f^(6)/f'' ~ 1/x^4.
  out.estimate.uncertainty = out.estimate.time * std::pow(n0 + 0.75, -4.0);
  out.estimate.peak_height = 0.0;

  // Closed form: sum_m m^-4 d^2/dn^2 [E_n h(u_m)], u_m = (Omega_n/m)^2 ~ x^(2/3),
  // divided by |E''| so that T increases when the shift flattens the spectrum.
  const double x = n0 + 0.75;
  const double e = energy_semiclassical(n0, params);
  const double e1 = 2.0 * e / (3.0 * x);
  const double omega_n = omega_ratio(n0, params);
  double sum = 0.0;
  const int m_cap = options.m_cap;
  for (int m = 1; m <= m_cap; ++m) {
    const double u = (omega_n / m) * (omega_n / m);
    const double u1 = 2.0 * u / (3.0 * x);
    const double u2 = -2.0 * u / (9.0 * x * x);
    const auto w = oscillator_weight(u);
    const double f2 = e2 * w.h + 2.0 * e1 * w.dh * u1 + e * (w.d2h * u1 * u1 + w.dh * u2);
    const double t = f2 / std::pow(double(m), 4);
    sum += t;
    if (m > 2 * omega_n + 16 && std::abs(t) * m / 3.0 < 1e-16 * std::abs(sum)) break;
  }
  out.closed_form = out.t0 * (1.0 - drive_prefactor(params) * 3.0 / std::pow(pi, 4) * sum / std::abs(e2));
  return out;
}

}  // namespace bouncelab
