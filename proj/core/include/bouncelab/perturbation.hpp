#pragma once

#include <vector>

#include "bouncelab/observables.hpp"
#include "bouncelab/scaling.hpp"

namespace bouncelab {

// Second-order (quadratic Stark) quasi-energy shifts of the driven bouncer and
// the revival time they imply. Off-resonance only.

struct StarkOptions {
  double guard = 0.05;          // reject m with |1 - (Omega_n/m)^2| below this
  double relative_tol = 1e-8;   // remainder bound relative to |shift|
  int m_cap = 10000;
  double n_min = 20.0;
  bool strict = true;           // throw NearResonance instead of flagging
};

struct StarkShiftResult {
  double shift = 0.0;            // J
  int m_max = 0;
  double remainder_bound = 0.0;  // J
  double omega_n = 0.0;          // Omega_n = 3 (n + 3/4) hbar omega / (2 E_n)
  std::vector<int> near_resonant;
  bool converged = true;
};

double omega_ratio(double n, const PhysicalParams& params);

/// Sum over intermediate levels with Bohr matrix elements and exact
/// semiclassical level differences.
StarkShiftResult stark_shift_direct(double n, const PhysicalParams& params,
                                    const StarkOptions& options = {});

/// Single sum over virtual oscillators m >= 1 with linearised level spacing.
StarkShiftResult stark_shift_semiclassical(double n, const PhysicalParams& params,
                                           const StarkOptions& options = {});

struct PerturbativeRevival {
  RevivalEstimate estimate;  // finite-difference value, method = perturbative
  double t0 = 0.0;           // s
  double closed_form = 0.0;  // s, analytic second derivative
  double curvature = 0.0;    // d^2 (E_n + dE_n) / dn^2 (J)
};

/// T = 4 pi hbar / |d^2(E_n + dE_n)/dn^2| at n0, five-point stencil with
/// step 1 in n, plus the closed-form linearised expression for comparison.
PerturbativeRevival revival_time_perturbative(double n0, const PhysicalParams& params,
                                              const StarkOptions& options = {});

}  // namespace bouncelab
