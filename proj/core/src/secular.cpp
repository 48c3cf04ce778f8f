#include "bouncelab/secular.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "bouncelab/errors.hpp"
#include "bouncelab/spectrum.hpp"

namespace bouncelab {

namespace {

constexpr double pi = std::numbers::pi;

// Number of eigenvalues below x of the symmetric tridiagonal matrix with
// diagonal d and constant off-diagonal q.
int sturm_count(const std::vector<double>& d, double q, double x) {
  int count = 0;
  double piv = 1.0;
  const double q2 = q * q;
  const double tiny = 1e-300;
  for (std::size_t i = 0; i < d.size(); ++i) {
    piv = d[i] - x - (i == 0 ? 0.0 : q2 / piv);
    if (piv == 0.0) piv = -tiny;
    if (piv < 0.0) ++count;
  }
  return count;
}

double truncated_char_value(double nu, double q, int half_width) {
  std::vector<double> d;
  d.reserve(2 * half_width + 1);
  int rank = 0;
  double lo = 0.0, hi = 0.0;
  for (int k = -half_width; k <= half_width; ++k) {
    const double v = (nu + 2.0 * k) * (nu + 2.0 * k);
    d.push_back(v);
    if (v < nu * nu) ++rank;
  }
  // The rank-th eigenvalue sits within 2|q| of the rank-th sorted diagonal.
  std::vector<double> sorted = d;
  std::nth_element(sorted.begin(), sorted.begin() + rank, sorted.end());
  lo = sorted[rank] - 2.0 * std::abs(q) - 1.0;
  hi = sorted[rank] + 2.0 * std::abs(q) + 1.0;
  for (int it = 0; it < 200 && hi - lo > 4e-16 * std::max(std::abs(lo), std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (sturm_count(d, q, mid) > rank)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

double curvature_five_point(double f_m2, double f_m1, double f_0, double f_p1, double f_p2) {
  return (-f_p2 + 16.0 * f_p1 - 30.0 * f_0 + 16.0 * f_m1 - f_m2) / 12.0;
}

}  // namespace

double resonance_action(int order, const PhysicalParams& params) {
  if (order < 1) throw InvalidParameter("resonance order must be >= 1");
  params.validate();
  if (!(params.omega > 0.0)) throw InvalidParameter("resonance needs a driving frequency > 0");
  const double n = order;
  return pi * pi * params.mass * params.gravity * params.gravity * n * n * n /
         (3.0 * std::pow(params.omega, 3));
}

int select_resonance(double i0, const PhysicalParams& params) {
  if (!(i0 > 0.0)) throw InvalidParameter("action I0 must be positive");
  if (!(params.omega > 0.0)) throw InvalidParameter("resonance needs a driving frequency > 0");
  const double h1 = action_state(i0, params).frequency;
  const double ratio = params.omega / h1;
  const int below = std::max(1, static_cast<int>(std::floor(ratio)));
  const int above = below + 1;
  const double d_below = std::abs(h1 - params.omega / below);
  const double d_above = std::abs(h1 - params.omega / above);
  return d_above < d_below ? above : below;
}

MathieuSetup make_mathieu_setup(double n0, const PhysicalParams& params,
                                const SecularOptions& options) {
  params.validate();
  if (!(params.omega > 0.0)) throw InvalidParameter("secular theory needs a driving frequency > 0");
  MathieuSetup s;
  s.i0 = (n0 + 0.75) * params.hbar;
  const ActionState at0 = action_state(s.i0, params);
  s.e0 = at0.energy;
  s.h1 = at0.frequency;
  s.h2 = at0.anharmonicity;
  if (options.r) {
    if (!(*options.r > 0.0)) throw InvalidParameter("prescribed r must be positive");
    const ActionState res = action_from_energy(*options.r * *options.r * s.e0, params);
    s.i_n = res.action;
    s.effective_order = params.omega / res.frequency;
    s.order = std::max(1, static_cast<int>(std::lround(s.effective_order)));
  } else {
    s.order = options.order ? *options.order : select_resonance(s.i0, params);
    s.i_n = resonance_action(s.order, params);
    s.effective_order = s.order;
  }
  const double n = s.effective_order;
  const double e_n = action_state(s.i_n, params).energy;
  s.r = std::sqrt(e_n / s.e0);
  s.a = s.r * s.r * params.hbar * params.omega / (4.0 * s.e0);
  s.coupling = params.mass * params.gravity * std::pow(s.i0 / s.i_n, 2.0 / 3.0);
  s.lambda = params.lambda;
  s.q = 4.0 * params.lambda * s.coupling / (n * n * s.h2 * params.hbar * params.hbar);
  s.nu0 = nu_index(n0, s, params);
  return s;
}

double mathieu_char_a(double nu, double q, double q_cap) {
  if (!std::isfinite(nu) || !std::isfinite(q)) throw InvalidParameter("nu and q must be finite");
  if (std::abs(nu - std::round(nu)) < 1e-6) {
    std::ostringstream os;
    os << "Mathieu order nu = " << nu << " is within 1e-6 of an integer (band edge)";
    throw NearIntegerOrder(os.str());
  }
  if (!(std::abs(q) < q_cap)) {
    std::ostringstream os;
    os << "|q| = " << std::abs(q) << " is not below the cap " << q_cap;
    throw DomainError(os.str());
  }
  if (q == 0.0) return nu * nu;
  int half = static_cast<int>(std::ceil(0.5 * std::abs(nu) + std::sqrt(std::abs(q)))) + 8;
  double prev = truncated_char_value(nu, q, half);
  for (int attempt = 0; attempt < 30; ++attempt) {
    half *= 2;
    const double next = truncated_char_value(nu, q, half);
    if (std::abs(next - prev) < 1e-12 * std::max(1.0, std::abs(next))) return next;
    prev = next;
  }
  throw NumericalError("Mathieu characteristic value did not settle under truncation growth");
}

double nu_index(double n, const MathieuSetup& setup, const PhysicalParams& params) {
  const double action = (n + 0.75) * params.hbar;
  return 2.0 / (setup.effective_order * params.hbar) *
         (action - 4.0 * setup.i0 + 3.0 * setup.i0 * std::cbrt(setup.i0 / setup.i_n));
}

double quasienergy_secular(double n, const MathieuSetup& setup, const PhysicalParams& params,
                           double q_cap) {
  const double order = setup.effective_order;
  const double hh = params.hbar * params.hbar;
  const double a = mathieu_char_a(nu_index(n, setup, params), setup.q, q_cap);
  const double detune = order * setup.h1 - params.omega;
  return order * order * setup.h2 * hh / 8.0 * a -
         detune * detune / (2.0 * order * order * setup.h2) + setup.e0;
}

double secular_ratio(double d, double r, double a) {
  const double w = (1.0 - r) * (1.0 - r);
  return 1.0 - d * d / 8.0 * (3.0 * w + a * a) / std::pow(w - a * a, 3);
}

double secular_ratio_large_energy(double d, double r) {
  return 1.0 - 3.0 / 8.0 * d * d / std::pow(1.0 - r, 4);
}

SecularRevival revival_time_secular(double n0, const PhysicalParams& params,
                                    const SecularOptions& options) {
  SecularRevival out;
  out.setup = make_mathieu_setup(n0, params, options);
  const auto& s = out.setup;
  out.t0 = 4.0 * pi * params.hbar / std::abs(energy_semiclassical_curvature(n0, params));

  // Only the a_nu(q) term carries n-dependence; differencing it alone avoids
  // cancelling against H0(I0).
  const double scale = s.effective_order * s.effective_order * s.h2 * params.hbar * params.hbar / 8.0;
  auto a_at = [&](double n) { return mathieu_char_a(nu_index(n, s, params), s.q, options.q_cap); };
  const double d2a = curvature_five_point(a_at(n0 - 2), a_at(n0 - 1), a_at(n0), a_at(n0 + 1),
                                          a_at(n0 + 2));
  const double curvature = scale * d2a;
  if (curvature == 0.0) throw NumericalError("secular quasi-energy curvature vanished");
  out.estimate.method = RevivalMethod::secular;
  out.estimate.time = 4.0 * pi * params.hbar / std::abs(curvature);
  // bisection resolution of a, propagated through the stencil
  const double a_scale = std::pow(std::abs(s.nu0) + 2.0 * std::abs(s.q) + 8.0, 2);
  out.estimate.uncertainty = out.estimate.time * 8e-16 * a_scale * 64.0 / 12.0 /
                             std::abs(d2a);
  out.estimate.peak_height = 0.0;

  const double d = params.mass * params.lambda * params.gravity / s.e0;
  out.closed_form = out.t0 * secular_ratio(d, s.r, s.a);
  out.closed_form_large_energy = out.t0 * secular_ratio_large_energy(d, s.r);
  return out;
}

}  // namespace bouncelab
