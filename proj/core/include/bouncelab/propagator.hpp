#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include "bouncelab/scaling.hpp"

namespace bouncelab {

// Split-step spectral integrator for the bouncer TDSE. Everything in this
// header is expressed in gravitational units (hbar = M = g = 1, lengths in
// l0, times in t0); convert at the boundary with UnitSystem.
//
// The spatial basis is the Dirichlet sine basis on [z_min, z_max] (the odd
// extension of the grid), so the wave function vanishes at both box edges.
// In hard-wall mode z_min must be 0 and the box edge is the mirror.

enum class Frame { moving, lab };
enum class WallMode { exponential, hard };

const char* to_string(Frame frame);
const char* to_string(WallMode mode);

struct Grid {
  std::size_t points = 4096;  // power of two
  double z_min = 0.0;
  double z_max = 420.0;

  double length() const { return z_max - z_min; }
  double spacing() const { return length() / static_cast<double>(points); }
  /// Cell-centred sample positions z_min + (j + 1/2) dz.
  double position(std::size_t j) const {
    return z_min + (static_cast<double>(j) + 0.5) * spacing();
  }
  /// Sine-basis wave number pi (k + 1) / L.
  double wavenumber(std::size_t k) const;
  void validate() const;

  static Grid from_si(std::size_t points, double z_min_m, double z_max_m, const UnitSystem& units);
  bool operator==(const Grid&) const = default;
};

/// Right-hand side of the moving-frame (or lab-frame) Schroedinger equation.
struct Hamiltonian {
  double gravity = 1.0;  // coefficient of the linear potential; 0 gives a free particle
  double v0 = 0.0;
  double kappa = 1.0;
  double lambda = 0.0;
  double omega = 0.0;
  WallMode wall = WallMode::hard;
  double wall_rounding = 0.0;  // hard wall: width of the smoothed |z|; 0 picks auto_wall_rounding

  static Hamiltonian from(const PhysicalParams& params, WallMode wall);

  /// Mirror displacement lambda sin(omega t) in the lab frame.
  double mirror_position(double t) const;
  double mirror_velocity(double t) const;
  double potential(double z, double t, Frame frame) const;
};

struct PropagationPlan {
  double dt = 0.0;
  double total_time = 0.0;
  std::size_t stride = 16;  // steps between samples
  Frame frame = Frame::moving;
  bool track_momentum = true;  // <p> costs two extra transforms per sample

  std::size_t steps() const;
  void validate(const Hamiltonian& h) const;

  /// dt = driving period / steps_per_period; requires omega > 0.
  static PropagationPlan for_drive(const Hamiltonian& h, double total_time,
                                   std::size_t steps_per_period = 256, std::size_t stride = 16);
};

/// Samples a_j = psi(z_j) sqrt(dz); sum |a_j|^2 is the norm.
struct WavepacketState {
  Grid grid;
  std::vector<std::complex<double>> amplitudes;
  double time = 0.0;
  Frame frame = Frame::moving;

  double norm() const;
};

/// Normalised Gaussian exp(-(z-z0)^2 / (2 dz)^2) exp(-i p0 (z - z0)), arguments in
/// gravitational units. With this phase convention <p> = -p0.
/// Throws GridTooSmall unless the packet clears both edges by 5 widths.
WavepacketState init_gaussian(double z0, double p0, double width, const Grid& grid,
                              Frame frame = Frame::moving);
WavepacketState init_gaussian(const WavepacketSpec& spec, const Grid& grid,
                              const UnitSystem& units, Frame frame = Frame::moving);

/// <a|b> with the grid weight folded into the amplitudes. Throws GridMismatch.
std::complex<double> inner_product(const WavepacketState& a, const WavepacketState& b);

struct TraceSample {
  double time;
  std::complex<double> correlation;
  double mean_z;
  double mean_p;
  double norm;
};

using SampleSink = std::function<void(const TraceSample&)>;

/// Default hard-wall rounding: max(3 dz, 3 sqrt(dt)).
double auto_wall_rounding(const Grid& grid, double dt);

class SplitStepPropagator {
 public:
  SplitStepPropagator(const Hamiltonian& hamiltonian, const Grid& grid,
                      const PropagationPlan& plan);
  ~SplitStepPropagator();
  SplitStepPropagator(SplitStepPropagator&&) noexcept;
  SplitStepPropagator& operator=(SplitStepPropagator&&) noexcept;

  const Hamiltonian& hamiltonian() const;
  const Grid& grid() const;
  const PropagationPlan& plan() const;

  /// One Strang step: half potential kick at t + dt/2, kinetic drift, half kick.
  void step(WavepacketState& state);

  /// Advances `state` by plan().total_time, emitting a sample at the start and
  /// every plan().stride steps (and at the end). The autocorrelation reference
  /// is the state passed in.
  void propagate(WavepacketState& state, const SampleSink& sink);

  double mean_position(const WavepacketState& state) const;
  double mean_momentum(const WavepacketState& state) const;
  /// <H(t)> for the frame of the state.
  double energy(const WavepacketState& state) const;
  /// Probability within `cells` grid spacings of the top edge.
  double top_edge_probability(const WavepacketState& state, std::size_t cells = 3) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Gauge map from moving to lab frame at time t: multiplies by exp(i v(t) z)
/// where v is the mirror velocity. Only valid when the mirror displacement
/// vanishes at t (sin(omega t) = 0), so no spatial shift is needed.
WavepacketState moving_to_lab(const WavepacketState& moving, const Hamiltonian& h);

/// Binary checkpoint: "BLCKPT01" magic, u32 version, u32 frame, u64 points,
/// f64 z_min, z_max, time, then interleaved re/im amplitudes. Little-endian.
void write_checkpoint(std::ostream& out, const WavepacketState& state);
WavepacketState read_checkpoint(std::istream& in);

}  // namespace bouncelab
