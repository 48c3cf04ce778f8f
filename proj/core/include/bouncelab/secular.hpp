#pragma once

#include <optional>

#include "bouncelab/observables.hpp"
#include "bouncelab/scaling.hpp"

namespace bouncelab {

// Pendulum (secular) treatment near the N-th primary resonance N H'(I) = omega,
// reduced to the Mathieu equation phi'' + (a - 2q cos 2 theta) phi = 0.

struct MathieuSetup {
  int order = 0;                // N
  double effective_order = 0;   // omega / H'(I_N); equals N unless r was prescribed
  double i0 = 0;                // J s
  double i_n = 0;               // J s
  double e0 = 0;                // H0(I0), J
  double h1 = 0;                // H'(I0), rad/s
  double h2 = 0;                // H''(I0), 1/(J s^2)
  double coupling = 0;          // V = M g (I0/I_N)^(2/3), N
  double lambda = 0;            // m
  double q = 0;
  double nu0 = 0;               // nu at I = I0
  double r = 0;                 // (E_N / E_n0)^(1/2)
  double a = 0;                 // r^2 hbar omega / (4 E_n0)
};

/// I_N = pi^2 M g^2 N^3 / (3 omega^3).
double resonance_action(int order, const PhysicalParams& params);

/// Integer N >= 1 minimising |H'(I0) - omega/N|, ties to the smaller N.
int select_resonance(double i0, const PhysicalParams& params);

struct SecularOptions {
  std::optional<int> order;      // overrides select_resonance
  std::optional<double> r;       // prescribes E_N = r^2 E_n0 instead of H0(I_N)
  double q_cap = 10.0;
};

MathieuSetup make_mathieu_setup(double n0, const PhysicalParams& params,
                                const SecularOptions& options = {});

/// Characteristic value a_nu(q) on the branch through nu^2 at q = 0.
/// Throws NearIntegerOrder within 1e-6 of an integer nu and DomainError for
/// |q| >= q_cap.
double mathieu_char_a(double nu, double q, double q_cap = 10.0);

/// nu(n) = (2 / (N hbar)) [ (n + 3/4) hbar - 4 I0 + 3 I0 (I0/I_N)^(1/3) ].
double nu_index(double n, const MathieuSetup& setup, const PhysicalParams& params);

/// (N^2 H'' hbar^2 / 8) a_nu(n)(q) - (N H' - omega)^2 / (2 N^2 H'') + H0(I0).
double quasienergy_secular(double n, const MathieuSetup& setup, const PhysicalParams& params,
                           double q_cap = 10.0);

struct SecularRevival {
  RevivalEstimate estimate;  // finite difference over the quasi-energies
  double t0 = 0.0;           // s
  double closed_form = 0.0;  // s, small-q closed form in r and a
  double closed_form_large_energy = 0.0;  // s, the same with a -> 0
  MathieuSetup setup;
};

/// Small-q closed forms for T_lambda / T0 with d = M lambda g / E_n0:
/// 1 - (d^2/8) (3(1-r)^2 + a^2) / ((1-r)^2 - a^2)^3, and its a -> 0 limit
/// 1 - (3/8) d^2 / (1-r)^4.
double secular_ratio(double d, double r, double a);
double secular_ratio_large_energy(double d, double r);

SecularRevival revival_time_secular(double n0, const PhysicalParams& params,
                                    const SecularOptions& options = {});

}  // namespace bouncelab
