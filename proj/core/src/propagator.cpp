#include "bouncelab/propagator.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <utility>

#include "bouncelab/errors.hpp"

namespace bouncelab {

namespace {

using cplx = std::complex<double>;
constexpr double pi = std::numbers::pi;

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t doubles)
      : data(static_cast<double*>(fftw_malloc(sizeof(double) * doubles))) {
    if (data == nullptr) throw std::bad_alloc();
    std::fill_n(data, doubles, 0.0);
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  double* data;
};

struct FftwPlan {
  FftwPlan(int n, double* buffer, fftw_r2r_kind kind) {
    std::lock_guard lock(planner_mutex());
    // Real and imaginary parts are two interleaved real transforms.
    plan = fftw_plan_many_r2r(1, &n, 2, buffer, nullptr, 2, 1, buffer, nullptr, 2, 1, &kind,
                              FFTW_ESTIMATE);
    if (plan == nullptr) throw NumericalError("FFTW could not create a sine/cosine plan");
  }
  ~FftwPlan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  FftwPlan(const FftwPlan&) = delete;
  FftwPlan& operator=(const FftwPlan&) = delete;
  void execute() const { fftw_execute(plan); }
  fftw_plan plan;
};

bool is_power_of_two(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

}  // namespace

const char* to_string(Frame frame) { return frame == Frame::moving ? "moving" : "lab"; }
const char* to_string(WallMode mode) {
  return mode == WallMode::hard ? "hard" : "exponential";
}

double Grid::wavenumber(std::size_t k) const {
  return pi * static_cast<double>(k + 1) / length();
}

void Grid::validate() const {
  if (!is_power_of_two(points)) {
    std::ostringstream os;
    os << "grid size must be a power of two >= 2, got " << points;
    throw InvalidParameter(os.str());
  }
  if (!(z_max > z_min) || !std::isfinite(z_min) || !std::isfinite(z_max))
    throw InvalidParameter("grid requires z_max > z_min");
}

Grid Grid::from_si(std::size_t points, double z_min_m, double z_max_m, const UnitSystem& units) {
  Grid g{points, z_min_m / units.length, z_max_m / units.length};
  g.validate();
  return g;
}

Hamiltonian Hamiltonian::from(const PhysicalParams& params, WallMode wall) {
  params.validate();
  const UnitSystem u = make_unit_system(params);
  const ScaledParams s = to_scaled(params, u);
  Hamiltonian h;
  h.gravity = 1.0;
  h.v0 = s.v0;
  h.kappa = s.kappa;
  h.lambda = s.lambda;
  h.omega = s.omega;
  h.wall = wall;
  return h;
}

double Hamiltonian::mirror_position(double t) const { return lambda * std::sin(omega * t); }
double Hamiltonian::mirror_velocity(double t) const {
  return lambda * omega * std::cos(omega * t);
}

double Hamiltonian::potential(double z, double t, Frame frame) const {
  if (frame == Frame::moving) {
    double v = z * (gravity - lambda * omega * omega * std::sin(omega * t));
    if (wall == WallMode::exponential) v += v0 * std::exp(-kappa * z);
    return v;
  }
  return gravity * z + v0 * std::exp(-kappa * (z - mirror_position(t)));
}

std::size_t PropagationPlan::steps() const {
  return static_cast<std::size_t>(std::llround(total_time / dt));
}

void PropagationPlan::validate(const Hamiltonian& h) const {
  if (!(dt > 0.0)) throw InvalidParameter("time step must be positive");
  if (!(total_time >= 0.0)) throw InvalidParameter("total time must be >= 0");
  if (stride < 1) throw InvalidParameter("sample stride must be >= 1");
  if (h.omega > 0.0 && h.omega * dt > 2.0 * pi / 128.0 * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "time step does not resolve the drive: omega dt = " << h.omega * dt
       << " > 2 pi / 128";
    throw InvalidParameter(os.str());
  }
}

PropagationPlan PropagationPlan::for_drive(const Hamiltonian& h, double total_time,
                                           std::size_t steps_per_period, std::size_t stride) {
  if (!(h.omega > 0.0)) throw InvalidParameter("for_drive requires omega > 0");
  PropagationPlan p;
  p.dt = 2.0 * pi / h.omega / static_cast<double>(steps_per_period);
  p.total_time = total_time;
  p.stride = stride;
  return p;
}

double WavepacketState::norm() const {
  double s = 0.0;
  for (const cplx& a : amplitudes) s += std::norm(a);
  return s;
}

WavepacketState init_gaussian(double z0, double p0, double width, const Grid& grid, Frame frame) {
  grid.validate();
  if (!(width > 0.0)) throw InvalidParameter("wave packet width must be positive");
  if (z0 - grid.z_min < 5.0 * width || grid.z_max - z0 < 5.0 * width) {
    std::ostringstream os;
    os << "wave packet at z0 = " << z0 << " with width " << width
       << " needs 5 widths clearance inside [" << grid.z_min << ", " << grid.z_max << "]";
    throw GridTooSmall(os.str());
  }
  WavepacketState s;
  s.grid = grid;
  s.frame = frame;
  s.amplitudes.resize(grid.points);
  const double dz = grid.spacing();
  const double prefactor = std::pow(2.0 * pi * width * width, -0.25) * std::sqrt(dz);
  for (std::size_t j = 0; j < grid.points; ++j) {
    const double x = grid.position(j) - z0;
    const double envelope = prefactor * std::exp(-x * x / (4.0 * width * width));
    s.amplitudes[j] = std::polar(envelope, -p0 * x);
  }
  const double scale = 1.0 / std::sqrt(s.norm());
  for (cplx& a : s.amplitudes) a *= scale;
  return s;
}

WavepacketState init_gaussian(const WavepacketSpec& spec, const Grid& grid,
                              const UnitSystem& units, Frame frame) {
  spec.validate();
  return init_gaussian(spec.z0 / units.length, spec.p0 / units.momentum(),
                       spec.width / units.length, grid, frame);
}

std::complex<double> inner_product(const WavepacketState& a, const WavepacketState& b) {
  if (!(a.grid == b.grid) || a.amplitudes.size() != b.amplitudes.size())
    throw GridMismatch("inner product of states on different grids");
  double re = 0.0;
  double im = 0.0;
  for (std::size_t j = 0; j < a.amplitudes.size(); ++j) {
    const cplx x = a.amplitudes[j];
    const cplx y = b.amplitudes[j];
    re += x.real() * y.real() + x.imag() * y.imag();
    im += x.real() * y.imag() - x.imag() * y.real();
  }
  return {re, im};
}

// In hard-wall mode the linear terms g z and a(t) z are replaced by the
// Gaussian-smoothed |z|, z erf(z/d) + d exp(-z^2/d^2)/sqrt(pi), which is even
// and smooth across the mirror. With the bare z the kick has a |z| kink in the
// odd extension of psi, and the wavenumber tail it injects every step piles up
// where k^2 dt / 2 is a multiple of 2 pi; ~1e-9 of probability then reaches the
// top of the box. The change is confined to a few d of the wall where
// |psi|^2 ~ 2 z^2 for every level, so it shifts all levels by the same amount.
namespace {

double rounded_abs(double z, double d) {
  if (d <= 0.0) return z;
  const double u = z / d;
  if (std::abs(u) > 7.0) return std::abs(z);
  return z * std::erf(u) + d * std::exp(-u * u) / std::sqrt(pi);
}

}  // namespace

// Three grid spacings, and wide enough that exp(-(k1 d)^2 / 4) is negligible at
// the first time-step resonance k1 = sqrt(4 pi / dt).
double auto_wall_rounding(const Grid& grid, double dt) {
  return std::max(3.0 * grid.spacing(), 3.0 * std::sqrt(dt));
}

// Propagation kernel.
//
// The Dirichlet sine transform (DST-II / its inverse) is evaluated through a
// complex FFT of the same length: with the samples sign-alternated and
// reordered as v_j = psi_{2j}, v_{N-1-j} = -psi_{2j+1}, the kinetic propagator
// in sine space becomes V'_k = alpha_k V_k + beta_k V_{N-k} in the Fourier
// space of v. The wave function is kept in that permuted layout between
// samples, so a step is kick, FFT, pairwise mix, inverse FFT.
struct SplitStepPropagator::Impl {
  Impl(const Hamiltonian& h_, const Grid& g_, const PropagationPlan& p_)
      : h(h_),
        grid(g_),
        plan(p_),
        n(g_.points),
        work(2 * g_.points),
        spectrum(2 * g_.points),
        scratch(2 * g_.points),
        scratch_forward(static_cast<int>(g_.points), scratch.data, FFTW_RODFT10),
        scratch_cosine(static_cast<int>(g_.points), scratch.data, FFTW_REDFT01) {
    {
      std::lock_guard lock(planner_mutex());
      const int ni = static_cast<int>(n);
      fft_forward = fftw_plan_dft_1d(ni, reinterpret_cast<fftw_complex*>(work.data),
                                     reinterpret_cast<fftw_complex*>(spectrum.data),
                                     FFTW_FORWARD, FFTW_ESTIMATE);
      fft_backward = fftw_plan_dft_1d(ni, reinterpret_cast<fftw_complex*>(spectrum.data),
                                      reinterpret_cast<fftw_complex*>(work.data),
                                      FFTW_BACKWARD, FFTW_ESTIMATE);
      if (fft_forward == nullptr || fft_backward == nullptr)
        throw NumericalError("FFTW could not create a complex plan");
    }
    const double dt = plan.dt;
    const double nn = static_cast<double>(n);
    // Phase of sine mode s is exp(-i dt k_s^2 / 2); the pair formula indexes it
    // by m = N - 1 - s.
    auto phase = [&](std::size_t m) {
      const double kk = grid.wavenumber(n - 1 - m);
      return std::polar(1.0, -0.5 * dt * kk * kk);
    };
    alpha.resize(n);
    beta.resize(n);
    alpha[0] = phase(0) / nn;
    beta[0] = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
      const cplx pk = phase(k);
      const cplx pnk = phase(n - k);
      alpha[k] = 0.5 * (pk + pnk) / nn;
      beta[k] = 0.5 * (pk - pnk) * std::polar(1.0, pi * static_cast<double>(k) / nn) / nn;
    }

    position.resize(n);
    for (std::size_t i = 0; i < n; ++i) position[i] = grid.position(original_index(i));
    if (h.wall == WallMode::hard) {
      rounding = h.wall_rounding > 0.0 ? h.wall_rounding : auto_wall_rounding(grid, dt);
      for (std::size_t i = 0; i < n; ++i) {
        const double c = rounded_abs(position[i], rounding) - position[i];
        if (c != 0.0) near_wall.emplace_back(i, c);
      }
    }
    static_half.resize(n);
    static_full.resize(n);
    wall_profile.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double z = position[i];
      double v = h.gravity * rounded_abs(z, rounding);
      if (h.wall == WallMode::exponential) {
        const double w = h.v0 * std::exp(-h.kappa * z);
        if (plan.frame == Frame::moving)
          v += w;
        else
          wall_profile[i] = w;
      }
      static_half[i] = std::polar(1.0, -0.5 * dt * v);
      static_full[i] = std::polar(1.0, -dt * v);
    }
  }

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(fft_forward);
    fftw_destroy_plan(fft_backward);
  }
  Impl(const Impl&) = delete;
  Impl& operator=(const Impl&) = delete;

  std::size_t original_index(std::size_t i) const {
    return i < n / 2 ? 2 * i : 2 * (n - 1 - i) + 1;
  }
  double permuted_sign(std::size_t i) const { return i < n / 2 ? 1.0 : -1.0; }

  // Coefficient of z in the moving-frame drive term.
  double drive(double t) const { return -h.lambda * h.omega * h.omega * std::sin(h.omega * t); }
  // Lab-frame wall modulation factor exp(kappa * mirror position).
  double wall_factor(double t) const { return std::exp(h.kappa * h.mirror_position(t)); }

  // work_i *= table_i * exp(-i linear z_i) * exp(-i wall_coef wall_i); returns the norm.
  double kick(const std::vector<cplx>& table, double linear, double wall_coef) {
    double* psi = work.data;
    double norm = 0.0;
    constexpr std::size_t block = 32;
    const bool lab_wall = plan.frame == Frame::lab && wall_coef != 0.0;
    // Positions are arithmetic with step +2dz in the first half and -2dz in the second.
    const double step = 2.0 * grid.spacing();
    const cplx w_up = std::polar(1.0, -linear * step);
    const cplx w_down = std::conj(w_up);
    for (std::size_t half = 0; half < 2; ++half) {
     const std::size_t lo = half == 0 ? 0 : n / 2;
     const std::size_t hi = half == 0 ? n / 2 : n;
     const cplx w = half == 0 ? w_up : w_down;
     for (std::size_t start = lo; start < hi; start += block) {
      cplx ph = std::polar(1.0, -linear * position[start]);
      const std::size_t end = std::min(hi, start + block);
      for (std::size_t i = start; i < end; ++i) {
        const cplx f = table[i];
        double fr = f.real() * ph.real() - f.imag() * ph.imag();
        double fi = f.real() * ph.imag() + f.imag() * ph.real();
        if (lab_wall) {
          const double a = -wall_coef * wall_profile[i];
          const double c = std::cos(a), s = std::sin(a);
          const double tr = fr * c - fi * s;
          fi = fr * s + fi * c;
          fr = tr;
        }
        const double re = psi[2 * i], im = psi[2 * i + 1];
        const double nr = re * fr - im * fi;
        const double ni = re * fi + im * fr;
        psi[2 * i] = nr;
        psi[2 * i + 1] = ni;
        norm += nr * nr + ni * ni;
        ph = {ph.real() * w.real() - ph.imag() * w.imag(),
              ph.real() * w.imag() + ph.imag() * w.real()};
      }
     }
    }
    if (linear != 0.0) {
      // unit-modulus, so the norm above stands
      for (const auto& [i, c] : near_wall) {
        const cplx f = std::polar(1.0, -linear * c);
        const cplx a(psi[2 * i], psi[2 * i + 1]);
        const cplx b = a * f;
        psi[2 * i] = b.real();
        psi[2 * i + 1] = b.imag();
      }
    }
    return norm;
  }

  double half_kick(double t_mid) {
    const double tau = 0.5 * plan.dt;
    if (plan.frame == Frame::moving) return kick(static_half, tau * drive(t_mid), 0.0);
    return kick(static_half, 0.0, tau * wall_factor(t_mid));
  }

  // Two adjacent half kicks merged into one pass.
  double merged_kick(double t_mid_a, double t_mid_b) {
    const double tau = 0.5 * plan.dt;
    if (plan.frame == Frame::moving)
      return kick(static_full, tau * (drive(t_mid_a) + drive(t_mid_b)), 0.0);
    return kick(static_full, 0.0, tau * (wall_factor(t_mid_a) + wall_factor(t_mid_b)));
  }

  void drift() {
    fftw_execute(fft_forward);
    double* v = spectrum.data;
    auto mix = [&](std::size_t a, std::size_t b) {
      // (V_a, V_b) <- (alpha_a V_a + beta_a V_b, alpha_b V_b + beta_b V_a)
      const double ar = v[2 * a], ai = v[2 * a + 1];
      const double br = v[2 * b], bi = v[2 * b + 1];
      const cplx aa = alpha[a], ba = beta[a], ab = alpha[b], bb = beta[b];
      v[2 * a] = aa.real() * ar - aa.imag() * ai + ba.real() * br - ba.imag() * bi;
      v[2 * a + 1] = aa.real() * ai + aa.imag() * ar + ba.real() * bi + ba.imag() * br;
      v[2 * b] = ab.real() * br - ab.imag() * bi + bb.real() * ar - bb.imag() * ai;
      v[2 * b + 1] = ab.real() * bi + ab.imag() * br + bb.real() * ai + bb.imag() * ar;
    };
    {
      const cplx a0 = alpha[0];
      const double r = v[0], i = v[1];
      v[0] = a0.real() * r - a0.imag() * i;
      v[1] = a0.real() * i + a0.imag() * r;
    }
    for (std::size_t k = 1; k < n / 2; ++k) mix(k, n - k);
    {
      const std::size_t k = n / 2;
      const cplx c = alpha[k] + beta[k];
      const double r = v[2 * k], i = v[2 * k + 1];
      v[2 * k] = c.real() * r - c.imag() * i;
      v[2 * k + 1] = c.real() * i + c.imag() * r;
    }
    fftw_execute(fft_backward);
  }

  void load(const WavepacketState& s) {
    for (std::size_t i = 0; i < n; ++i) {
      const cplx a = s.amplitudes[original_index(i)] * permuted_sign(i);
      work.data[2 * i] = a.real();
      work.data[2 * i + 1] = a.imag();
    }
  }
  void store(WavepacketState& s) const {
    for (std::size_t i = 0; i < n; ++i)
      s.amplitudes[original_index(i)] =
          cplx(work.data[2 * i], work.data[2 * i + 1]) * permuted_sign(i);
  }

  void check_compatible(const WavepacketState& s) const {
    if (!(s.grid == grid) || s.amplitudes.size() != n)
      throw GridMismatch("state grid differs from propagator grid");
    if (s.frame != plan.frame)
      throw InvalidParameter(std::string("state is tagged ") + to_string(s.frame) +
                             "-frame but the plan propagates in the " + to_string(plan.frame) +
                             " frame");
  }

  void copy_to_scratch(const WavepacketState& s) {
    std::memcpy(scratch.data, static_cast<const void*>(s.amplitudes.data()),
                sizeof(double) * 2 * n);
  }

  double mean_momentum(const WavepacketState& s) {
    copy_to_scratch(s);
    scratch_forward.execute();
    // Sine coefficient a_k = Y_k / N (k < N-1); d/dz sin -> k cos. Shift into
    // the REDFT01 layout X_{k+1} = a_k kk / 2; the top mode drops out.
    double* c = scratch.data;
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t k = n - 1; k >= 1; --k) {
      const double f = 0.5 * inv_n * grid.wavenumber(k - 1);
      c[2 * k] = c[2 * (k - 1)] * f;
      c[2 * k + 1] = c[2 * (k - 1) + 1] * f;
    }
    c[0] = 0.0;
    c[1] = 0.0;
    scratch_cosine.execute();
    double p = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const cplx a = s.amplitudes[j];
      // Im(conj(a) * da)
      p += a.real() * c[2 * j + 1] - a.imag() * c[2 * j];
    }
    return p;
  }

  double kinetic_energy(const WavepacketState& s) {
    copy_to_scratch(s);
    scratch_forward.execute();
    const double* c = scratch.data;
    double e = 0.0;
    const double nn = static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double weight = (k + 1 == n) ? 1.0 / (4.0 * nn) : 1.0 / (2.0 * nn);
      const double kk = grid.wavenumber(k);
      e += weight * (c[2 * k] * c[2 * k] + c[2 * k + 1] * c[2 * k + 1]) * 0.5 * kk * kk;
    }
    return e;
  }

  double edge_probability(const WavepacketState& s, std::size_t cells, bool top) const {
    cells = std::min(cells, n);
    double p = 0.0;
    for (std::size_t i = 0; i < cells; ++i) p += std::norm(s.amplitudes[top ? n - 1 - i : i]);
    return p;
  }

  Hamiltonian h;
  Grid grid;
  PropagationPlan plan;
  std::size_t n;
  FftwBuffer work;      // permuted wave function
  FftwBuffer spectrum;  // its Fourier transform
  FftwBuffer scratch;
  FftwPlan scratch_forward;
  FftwPlan scratch_cosine;
  fftw_plan fft_forward = nullptr;
  fftw_plan fft_backward = nullptr;
  std::vector<cplx> alpha;
  std::vector<cplx> beta;
  std::vector<double> position;  // permuted order
  std::vector<cplx> static_half;
  std::vector<cplx> static_full;
  std::vector<double> wall_profile;
  double rounding = 0.0;
  std::vector<std::pair<std::size_t, double>> near_wall;  // (permuted index, f(z) - z)
};

SplitStepPropagator::SplitStepPropagator(const Hamiltonian& hamiltonian, const Grid& grid,
                                         const PropagationPlan& plan) {
  grid.validate();
  plan.validate(hamiltonian);
  if (hamiltonian.wall == WallMode::hard && grid.z_min != 0.0)
    throw InvalidParameter("hard-wall mode places the mirror at the grid origin; set z_min = 0");
  if (hamiltonian.wall == WallMode::hard && plan.frame == Frame::lab)
    throw InvalidParameter("the lab frame needs the exponential wall (the mirror moves)");
  impl_ = std::make_unique<Impl>(hamiltonian, grid, plan);
}

SplitStepPropagator::~SplitStepPropagator() = default;
SplitStepPropagator::SplitStepPropagator(SplitStepPropagator&&) noexcept = default;
SplitStepPropagator& SplitStepPropagator::operator=(SplitStepPropagator&&) noexcept = default;

const Hamiltonian& SplitStepPropagator::hamiltonian() const { return impl_->h; }
const Grid& SplitStepPropagator::grid() const { return impl_->grid; }
const PropagationPlan& SplitStepPropagator::plan() const { return impl_->plan; }

void SplitStepPropagator::step(WavepacketState& state) {
  impl_->check_compatible(state);
  const double before = state.norm();
  impl_->load(state);
  const double t_mid = state.time + 0.5 * impl_->plan.dt;
  impl_->half_kick(t_mid);
  impl_->drift();
  const double after = impl_->half_kick(t_mid);
  if (!(std::abs(after - before) <= 1e-6)) {
    std::ostringstream os;
    os << "norm changed by " << after - before
       << " in one step; use a smaller time step or a larger box";
    throw InstabilityError(os.str());
  }
  impl_->store(state);
  state.time += impl_->plan.dt;
}

void SplitStepPropagator::propagate(WavepacketState& state, const SampleSink& sink) {
  Impl& im = *impl_;
  im.check_compatible(state);
  const WavepacketState reference = state;
  const double t0 = state.time;
  const double dt = im.plan.dt;
  const std::size_t steps = im.plan.steps();
  const bool check_bottom = im.h.wall == WallMode::exponential && im.grid.z_min < 0.0;

  auto emit = [&](double norm) {
    const double top = im.edge_probability(state, 3, true);
    const double bottom = check_bottom ? im.edge_probability(state, 3, false) : 0.0;
    if (top > 1e-10 || bottom > 1e-10) {
      std::ostringstream os;
      os << "wave packet reached the box edge at t = " << state.time << " (top " << top
         << ", bottom " << bottom << "); enlarge the box";
      throw InstabilityError(os.str());
    }
    if (sink) {
      sink(TraceSample{state.time, inner_product(reference, state), mean_position(state),
                       im.plan.track_momentum ? im.mean_momentum(state) : 0.0, norm});
    }
  };

  emit(state.norm());
  if (steps == 0) return;

  double previous = state.norm();
  auto check_norm = [&](double norm, std::size_t k) {
    if (!(std::abs(norm - previous) <= 1e-6)) {
      std::ostringstream os;
      os << "norm changed by " << norm - previous << " at step " << k
         << "; use a smaller time step or a larger box";
      throw InstabilityError(os.str());
    }
    previous = norm;
  };

  im.load(state);
  im.half_kick(t0 + 0.5 * dt);
  for (std::size_t k = 0; k < steps; ++k) {
    im.drift();
    const double t_mid = t0 + (static_cast<double>(k) + 0.5) * dt;
    const bool last = k + 1 == steps;
    if (last || (k + 1) % im.plan.stride == 0) {
      const double norm = im.half_kick(t_mid);
      check_norm(norm, k);
      im.store(state);
      state.time = t0 + static_cast<double>(k + 1) * dt;
      emit(norm);
      if (!last) im.half_kick(t_mid + dt);
    } else {
      check_norm(im.merged_kick(t_mid, t_mid + dt), k);
    }
  }
}

double SplitStepPropagator::mean_position(const WavepacketState& state) const {
  double z = 0.0;
  for (std::size_t j = 0; j < state.amplitudes.size(); ++j)
    z += state.grid.position(j) * std::norm(state.amplitudes[j]);
  return z;
}

double SplitStepPropagator::mean_momentum(const WavepacketState& state) const {
  impl_->check_compatible(state);
  return impl_->mean_momentum(state);
}

double SplitStepPropagator::energy(const WavepacketState& state) const {
  impl_->check_compatible(state);
  double v = 0.0;
  for (std::size_t j = 0; j < state.amplitudes.size(); ++j) {
    const double z = state.grid.position(j);
    double u = impl_->h.potential(z, state.time, state.frame);
    if (impl_->rounding > 0.0)
      u += (impl_->h.gravity + impl_->drive(state.time)) * (rounded_abs(z, impl_->rounding) - z);
    v += u * std::norm(state.amplitudes[j]);
  }
  return impl_->kinetic_energy(state) + v;
}

double SplitStepPropagator::top_edge_probability(const WavepacketState& state,
                                                 std::size_t cells) const {
  return impl_->edge_probability(state, cells, true);
}

WavepacketState moving_to_lab(const WavepacketState& moving, const Hamiltonian& h) {
  WavepacketState lab = moving;
  lab.frame = Frame::lab;
  const double v = h.mirror_velocity(moving.time);
  for (std::size_t j = 0; j < lab.amplitudes.size(); ++j)
    lab.amplitudes[j] *= std::polar(1.0, v * lab.grid.position(j));
  return lab;
}

namespace {

constexpr char checkpoint_magic[8] = {'B', 'L', 'C', 'K', 'P', 'T', '0', '1'};
constexpr std::uint32_t checkpoint_version = 1;

template <class T>
void put_le(std::ostream& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  in.read(reinterpret_cast<char*>(bytes), sizeof(T));
  if (!in) throw Error("truncated checkpoint");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void write_checkpoint(std::ostream& out, const WavepacketState& state) {
  out.write(checkpoint_magic, sizeof(checkpoint_magic));
  put_le<std::uint32_t>(out, checkpoint_version);
  put_le<std::uint32_t>(out, state.frame == Frame::moving ? 0u : 1u);
  put_le<std::uint64_t>(out, state.grid.points);
  put_le<double>(out, state.grid.z_min);
  put_le<double>(out, state.grid.z_max);
  put_le<double>(out, state.time);
  for (const cplx& a : state.amplitudes) {
    put_le<double>(out, a.real());
    put_le<double>(out, a.imag());
  }
  if (!out) throw Error("failed to write checkpoint");
}

WavepacketState read_checkpoint(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, checkpoint_magic, sizeof(magic)) != 0)
    throw Error("not a bouncelab checkpoint");
  const auto version = get_le<std::uint32_t>(in);
  if (version != checkpoint_version) {
    std::ostringstream os;
    os << "unsupported checkpoint version " << version;
    throw Error(os.str());
  }
  WavepacketState s;
  s.frame = get_le<std::uint32_t>(in) == 0 ? Frame::moving : Frame::lab;
  s.grid.points = static_cast<std::size_t>(get_le<std::uint64_t>(in));
  s.grid.z_min = get_le<double>(in);
  s.grid.z_max = get_le<double>(in);
  s.time = get_le<double>(in);
  s.grid.validate();
  s.amplitudes.resize(s.grid.points);
  for (cplx& a : s.amplitudes) {
    const double re = get_le<double>(in);
    const double im = get_le<double>(in);
    a = {re, im};
  }
  return s;
}

}  // namespace bouncelab
