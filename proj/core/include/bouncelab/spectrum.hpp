#pragma once

#include <iosfwd>
#include <vector>

#include "bouncelab/scaling.hpp"

namespace bouncelab {

// Unperturbed levels of the quantum bouncer (linear potential above an
// impenetrable floor), classical action-angle quantities and the
// large-n dipole matrix elements. All inputs and outputs are SI; pass
// PhysicalParams::gravitational() to work in hbar = M = g = 1.

/// Semiclassical level E_n = (1/2)(M g^2)^(1/3) [3 pi hbar (n + 3/4)]^(2/3).
/// `n` may be any real >= -3/4. Throws DomainError otherwise.
double energy_semiclassical(double n, const PhysicalParams& params);

/// d^2 E_n / dn^2 of the semiclassical levels (negative).
double energy_semiclassical_curvature(double n, const PhysicalParams& params);

/// Magnitude a_n of the (n+1)-th zero of Ai, i.e. Ai(-a_n) = 0.
double airy_zero(int n);

/// Exact level (hbar^2 M g^2 / 2)^(1/3) a_n of the ideal-wall bouncer.
double energy_airy_exact(int n, const PhysicalParams& params);

/// Bohr-correspondence estimate of <n+m| z |n> in metres, sign as printed
/// in the classic result (always negative for n + 3/4 > |m|/3).
double matrix_element_bohr(double n, int m, const PhysicalParams& params);

struct ActionState {
  double action;         // I (J s)
  double energy;         // H0(I) (J)
  double frequency;      // H'(I) (rad/s)
  double anharmonicity;  // H''(I) (1/(J s^2))
};

/// Classical state of the bouncer at action I.
ActionState action_state(double action, const PhysicalParams& params);

/// Inverts H0(I) = E. Throws DomainError for E <= 0.
ActionState action_from_energy(double energy, const PhysicalParams& params);

/// Classical bounce period 2 sqrt(2E/M) / g.
double bounce_period(double energy, const PhysicalParams& params);

struct SpectrumRow {
  int n;
  double semiclassical;  // J
  double airy;           // J
  double relative_gap() const { return (airy - semiclassical) / airy; }
};

struct SpectrumTable {
  std::vector<SpectrumRow> rows;
  PhysicalParams params;
};

SpectrumTable build_spectrum_table(int n_first, int n_last, const PhysicalParams& params);

/// Columns: n, E_semiclassical_J, E_airy_J, relative_gap.
void write_spectrum_csv(std::ostream& out, const SpectrumTable& table);

}  // namespace bouncelab
