#include <gtest/gtest.h>

#include <boost/math/special_functions/airy.hpp>
#include <cmath>
#include <sstream>

#include "bouncelab/errors.hpp"
#include "bouncelab/propagator.hpp"
#include "bouncelab/spectrum.hpp"
#include "oracles.hpp"

using namespace bouncelab;

namespace {

Hamiltonian free_particle() {
  Hamiltonian h;
  h.gravity = 0.0;
  h.wall = WallMode::hard;
  return h;
}

PropagationPlan plan_for(double dt, double total, std::size_t stride = 1) {
  PropagationPlan p;
  p.dt = dt;
  p.total_time = total;
  p.stride = stride;
  return p;
}

double max_difference(const std::vector<std::complex<double>>& a,
                      const std::vector<std::complex<double>>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST(Grid, GeometryAndValidation) {
  Grid g{8, 0.0, 4.0};
  EXPECT_DOUBLE_EQ(g.spacing(), 0.5);
  EXPECT_DOUBLE_EQ(g.position(0), 0.25);
  EXPECT_DOUBLE_EQ(g.wavenumber(0), M_PI / 4.0);
  EXPECT_THROW((Grid{12, 0.0, 1.0}).validate(), InvalidParameter);
  EXPECT_THROW((Grid{8, 1.0, 1.0}).validate(), InvalidParameter);
}

TEST(InitialState, NormalisedGaussianOverlap) {
  const Grid g{4096, 0.0, 200.0};
  const double sigma = 1.3;
  for (double d : {0.0, 1.0, 2.5, 4.0}) {
    const auto a = init_gaussian(80.0, 0.0, sigma, g);
    const auto b = init_gaussian(80.0 + d, 0.0, sigma, g);
    EXPECT_NEAR(a.norm(), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(inner_product(a, b)), std::exp(-d * d / (8.0 * sigma * sigma)), 1e-10);
  }
}

TEST(InitialState, NeedsClearance) {
  const Grid g{256, 0.0, 20.0};
  EXPECT_THROW(init_gaussian(2.0, 0.0, 1.0, g), GridTooSmall);
  EXPECT_THROW(init_gaussian(18.0, 0.0, 1.0, g), GridTooSmall);
  EXPECT_NO_THROW(init_gaussian(10.0, 0.0, 1.0, g));
}

TEST(InitialState, MismatchedGridsAreRejected) {
  const auto a = init_gaussian(10.0, 0.0, 1.0, Grid{256, 0.0, 20.0});
  const auto b = init_gaussian(10.0, 0.0, 1.0, Grid{256, 0.0, 21.0});
  EXPECT_THROW(inner_product(a, b), GridMismatch);
}

TEST(Drift, MatchesDirectSineProjection) {
  const Grid g{64, 0.0, 16.0};
  auto s = init_gaussian(6.0, 1.5, 0.9, g);
  const auto expected = oracle::free_evolution_sine(s.amplitudes, g.length(), 0.35);
  SplitStepPropagator prop(free_particle(), g, plan_for(0.07, 0.35));
  for (int i = 0; i < 5; ++i) prop.step(s);
  EXPECT_LT(max_difference(s.amplitudes, expected), 1e-12);
}

TEST(Drift, FreeGaussianSpreads) {
  const Grid g{2048, 0.0, 400.0};
  const double sigma = 1.0;
  auto s = init_gaussian(200.0, 0.0, sigma, g);
  SplitStepPropagator prop(free_particle(), g, plan_for(0.05, 40.0, 20));
  std::vector<TraceSample> trace;
  prop.propagate(s, [&](const TraceSample& t) { trace.push_back(t); });
  ASSERT_GT(trace.size(), 10u);
  for (const auto& t : trace)
    EXPECT_NEAR(std::abs(t.correlation), oracle::free_gaussian_autocorrelation(sigma, t.time), 1e-9)
        << t.time;
}

TEST(Gravity, EhrenfestFallBeforeBounce) {
  // <z>(t) = z0 - t^2 / 2 exactly for a linear potential while the packet is
  // far from both walls.
  const Grid g{2048, 0.0, 300.0};
  Hamiltonian h;
  h.wall = WallMode::hard;
  auto s = init_gaussian(200.0, 0.0, 2.0, g);
  SplitStepPropagator prop(h, g, plan_for(0.01, 10.0, 100));
  std::vector<TraceSample> trace;
  prop.propagate(s, [&](const TraceSample& t) { trace.push_back(t); });
  for (const auto& t : trace) {
    EXPECT_NEAR(t.mean_z, 200.0 - 0.5 * t.time * t.time, 1e-6) << t.time;
    EXPECT_NEAR(t.mean_p, -t.time, 1e-6) << t.time;
  }
}

TEST(Gravity, AiryEigenstatesOnlyAcquirePhase) {
  // The rounded wall shifts every level by the same constant, so the test pins
  // stationarity and the relative phase of two levels.
  const Grid g{1024, 0.0, 30.0};
  Hamiltonian h;
  h.wall = WallMode::hard;
  auto run = [&](int n) {
    WavepacketState s;
    s.grid = g;
    s.amplitudes.resize(g.points);
    for (std::size_t j = 0; j < g.points; ++j)
      s.amplitudes[j] = boost::math::airy_ai(std::cbrt(2.0) * g.position(j) - airy_zero(n));
    const double scale = 1.0 / std::sqrt(s.norm());
    for (auto& a : s.amplitudes) a *= scale;
    SplitStepPropagator prop(h, g, plan_for(1e-3, 5.0, 1000));
    std::vector<TraceSample> trace;
    prop.propagate(s, [&](const TraceSample& t) { trace.push_back(t); });
    return trace;
  };
  const auto a = run(3), b = run(6);
  const double gap = (airy_zero(6) - airy_zero(3)) / std::cbrt(2.0);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(std::abs(a[i].correlation), 1.0, 1e-6);
    EXPECT_NEAR(std::abs(b[i].correlation), 1.0, 1e-6);
    const auto relative = b[i].correlation * std::conj(a[i].correlation);
    EXPECT_NEAR(std::abs(relative - std::polar(1.0, -gap * a[i].time)), 0.0, 1e-5) << a[i].time;
  }
}

TEST(Propagate, ConservesNormUnderDrive) {
  const auto p = [] {
    auto q = PhysicalParams::gravitational();
    q.omega = 1.0;
    q.lambda = 0.05;
    return q;
  }();
  const auto h = Hamiltonian::from(p, WallMode::hard);
  const Grid g{1024, 0.0, 80.0};
  auto s = init_gaussian(20.0, 0.0, 1.0, g);
  SplitStepPropagator prop(h, g, PropagationPlan::for_drive(h, 64.0 * M_PI, 256, 64));
  double worst = 0.0;
  prop.propagate(s, [&](const TraceSample& t) { worst = std::max(worst, std::abs(t.norm - 1.0)); });
  EXPECT_LT(worst, 1e-10);
  EXPECT_NEAR(s.time, 64.0 * M_PI, 1e-9);
}

TEST(Propagate, SecondOrderInTimeStep) {
  auto p = PhysicalParams::gravitational();
  p.omega = 1.0;
  p.lambda = 0.2;
  const auto h = Hamiltonian::from(p, WallMode::hard);
  const Grid g{512, 0.0, 50.0};
  auto run = [&](std::size_t per_period) {
    auto s = init_gaussian(15.0, 0.0, 1.0, g);
    SplitStepPropagator prop(h, g, PropagationPlan::for_drive(h, 4.0 * M_PI, per_period, 1 << 20));
    prop.propagate(s, nullptr);
    return s;
  };
  // From 1024 steps per period the wall rounding is set by the grid alone, so
  // the three runs integrate the same Hamiltonian.
  const auto coarse = run(1024), mid = run(2048), fine = run(4096);
  const double e1 = max_difference(coarse.amplitudes, fine.amplitudes);
  const double e2 = max_difference(mid.amplitudes, fine.amplitudes);
  // errors against the finest run scale as (1 - 1/16) : (1/4 - 1/16) for O(dt^2)
  EXPECT_NEAR(e1 / e2, 5.0, 0.5);
}

TEST(Frames, LabAndMovingAgreeAtWholePeriods) {
  auto p = PhysicalParams::gravitational();
  p.omega = 1.0;
  p.lambda = 0.3;
  p.kappa = 4.0;
  p.v0 = 40.0;
  const auto h = Hamiltonian::from(p, WallMode::exponential);
  const Grid g{2048, -6.0, 70.0};
  auto moving = init_gaussian(15.0, 0.0, 1.0, g, Frame::moving);
  auto lab = moving_to_lab(moving, h);
  auto plan = PropagationPlan::for_drive(h, 6.0 * M_PI, 512, 512);
  SplitStepPropagator pm(h, g, plan);
  plan.frame = Frame::lab;
  SplitStepPropagator pl(h, g, plan);
  std::vector<TraceSample> tm, tl;
  pm.propagate(moving, [&](const TraceSample& t) { tm.push_back(t); });
  pl.propagate(lab, [&](const TraceSample& t) { tl.push_back(t); });
  ASSERT_EQ(tm.size(), tl.size());
  // the frames differ by the global gauge phase int v^2/2 dt = lambda^2 omega^2 t / 4
  for (std::size_t i = 0; i < tm.size(); ++i) {
    const auto shifted = tm[i].correlation * std::polar(1.0, 0.25 * p.lambda * p.lambda * tm[i].time);
    EXPECT_NEAR(std::abs(shifted - tl[i].correlation), 0.0, 1e-5) << tm[i].time;
  }
}

TEST(Propagator, RejectsInconsistentSetups) {
  Hamiltonian h;
  h.omega = 1.0;
  h.wall = WallMode::hard;
  EXPECT_THROW(SplitStepPropagator(h, Grid{256, -1.0, 20.0}, plan_for(0.01, 1.0)), InvalidParameter);
  auto lab = plan_for(0.01, 1.0);
  lab.frame = Frame::lab;
  EXPECT_THROW(SplitStepPropagator(h, Grid{256, 0.0, 20.0}, lab), InvalidParameter);
  EXPECT_THROW(SplitStepPropagator(h, Grid{256, 0.0, 20.0}, plan_for(0.1, 1.0)), InvalidParameter);
}

TEST(Propagator, PacketAtTopEdgeIsReported) {
  const Grid g{256, 0.0, 30.0};
  auto s = init_gaussian(20.0, -6.0, 1.0, g);  // moving up fast
  SplitStepPropagator prop(free_particle(), g, plan_for(0.01, 5.0, 10));
  EXPECT_THROW(prop.propagate(s, nullptr), InstabilityError);
}

TEST(Checkpoint, RoundTrip) {
  auto s = init_gaussian(10.0, 0.4, 1.0, Grid{128, 0.0, 20.0});
  s.time = 3.25;
  std::stringstream buf;
  write_checkpoint(buf, s);
  const auto back = read_checkpoint(buf);
  EXPECT_EQ(back.grid, s.grid);
  EXPECT_EQ(back.time, s.time);
  EXPECT_EQ(back.amplitudes, s.amplitudes);
  std::stringstream junk("not a checkpoint at all");
  EXPECT_THROW(read_checkpoint(junk), Error);
}
