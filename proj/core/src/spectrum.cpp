#include "bouncelab/spectrum.hpp"

#include <boost/math/special_functions/airy.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include "bouncelab/errors.hpp"

namespace bouncelab {

namespace {

constexpr double pi = std::numbers::pi;

// (M g^2)^(1/3), the energy scale of the action-energy relation.
double action_energy_scale(const PhysicalParams& p) {
  return std::cbrt(p.mass * p.gravity * p.gravity);
}

}  // namespace

double energy_semiclassical(double n, const PhysicalParams& params) {
  if (!(n >= -0.75)) {
    std::ostringstream os;
    os << "semiclassical level requires n >= -3/4, got " << n;
    throw DomainError(os.str());
  }
  const double action = params.hbar * (n + 0.75);
  return 0.5 * action_energy_scale(params) * std::pow(3.0 * pi * action, 2.0 / 3.0);
}

double energy_semiclassical_curvature(double n, const PhysicalParams& params) {
  const double x = n + 0.75;
  if (!(x > 0.0)) throw DomainError("curvature requires n > -3/4");
  // E = C x^(2/3)  =>  E'' = -(2/9) E / x^2
  return -(2.0 / 9.0) * energy_semiclassical(n, params) / (x * x);
}

double airy_zero(int n) {
  if (n < 0) throw DomainError("Airy zero index must be >= 0");
  const double t = 3.0 * pi * (4.0 * n + 3.0) / 8.0;
  const double estimate = std::pow(t, 2.0 / 3.0) * (1.0 + 5.0 / (48.0 * t * t));
  const double spacing = pi / std::sqrt(estimate);
  auto ai = [](double a) { return boost::math::airy_ai(-a); };

  double lo = estimate - 0.3 * spacing;
  double hi = estimate + 0.3 * spacing;
  for (int widen = 0; ai(lo) * ai(hi) > 0.0; ++widen) {
    if (widen > 8) {
      std::ostringstream os;
      os << "could not bracket Airy zero " << n << " in [" << lo << ", " << hi << "]";
      throw NumericalError(os.str());
    }
    lo -= 0.1 * spacing;
    hi += 0.1 * spacing;
  }

  std::uintmax_t iterations = 100;
  const auto bracket = boost::math::tools::toms748_solve(
      ai, lo, hi, boost::math::tools::eps_tolerance<double>(48), iterations);
  const double root = 0.5 * (bracket.first + bracket.second);
  if (iterations >= 100 || std::abs(bracket.second - bracket.first) > 1e-12 * root) {
    std::ostringstream os;
    os << "Airy zero " << n << " did not converge; final bracket [" << bracket.first << ", "
       << bracket.second << "]";
    throw NumericalError(os.str());
  }
  return root;
}

double energy_airy_exact(int n, const PhysicalParams& params) {
  const double scale = std::cbrt(params.hbar * params.hbar * params.mass * params.gravity *
                                 params.gravity / 2.0);
  return scale * airy_zero(n);
}

double matrix_element_bohr(double n, int m, const PhysicalParams& params) {
  if (m == 0) throw DomainError("Bohr matrix element is undefined for m = 0");
  if (n + m < 0.0) {
    std::ostringstream os;
    os << "Bohr matrix element requires n + m >= 0 (n = " << n << ", m = " << m << ")";
    throw DomainError(os.str());
  }
  const double energy = energy_semiclassical(n, params);
  const double mm = static_cast<double>(m);
  return -(2.0 * energy / (params.mass * pi * pi * mm * mm * params.gravity)) *
         (1.0 + mm / (3.0 * (n + 0.75)));
}

ActionState action_state(double action, const PhysicalParams& params) {
  if (!(action > 0.0)) throw DomainError("action must be positive");
  ActionState s;
  s.action = action;
  s.energy = 0.5 * action_energy_scale(params) * std::pow(3.0 * pi * action, 2.0 / 3.0);
  s.frequency = (2.0 / 3.0) * s.energy / action;
  s.anharmonicity = -s.frequency / (3.0 * action);
  return s;
}

ActionState action_from_energy(double energy, const PhysicalParams& params) {
  if (!(energy > 0.0)) throw DomainError("energy must be positive");
  const double action =
      std::pow(2.0 * energy / action_energy_scale(params), 1.5) / (3.0 * pi);
  ActionState s = action_state(action, params);
  s.energy = energy;
  return s;
}

double bounce_period(double energy, const PhysicalParams& params) {
  return 2.0 * std::sqrt(2.0 * energy / params.mass) / params.gravity;
}

SpectrumTable build_spectrum_table(int n_first, int n_last, const PhysicalParams& params) {
  if (n_first < 0 || n_last < n_first) throw DomainError("invalid spectrum range");
  SpectrumTable table;
  table.params = params;
  table.rows.reserve(static_cast<std::size_t>(n_last - n_first + 1));
  for (int n = n_first; n <= n_last; ++n)
    table.rows.push_back({n, energy_semiclassical(n, params), energy_airy_exact(n, params)});
  return table;
}

void write_spectrum_csv(std::ostream& out, const SpectrumTable& table) {
  out << "n,E_semiclassical_J,E_airy_J,relative_gap\n";
  out << std::setprecision(17);
  for (const auto& row : table.rows)
    out << row.n << ',' << row.semiclassical << ',' << row.airy << ',' << row.relative_gap()
        << '\n';
}

}  // namespace bouncelab
