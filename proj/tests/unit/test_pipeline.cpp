#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <sstream>

#include "bouncelab/errors.hpp"
#include "bouncelab/pipeline.hpp"

using namespace bouncelab;

namespace {

// Low-lying packet: n0 ~ 22, T0 ~ 0.29 s, a few seconds of propagation.
RunConfig small_run() {
  RunConfig c;
  c.packet = {5e-6, 0.0, 0.2e-6};
  c.grid_points = 1024;
  c.z_max = 30e-6;
  c.steps_per_period = 1024;
  c.sample_stride = 64;
  return c;
}

std::vector<RunConfig> lambda_points(const std::vector<double>& bars) {
  std::vector<RunConfig> out;
  for (double lb : bars) {
    RunConfig c;
    c.params.lambda = lb * c.params.gravity / (c.params.omega * c.params.omega);
    out.push_back(c);
  }
  return out;
}

}  // namespace

TEST(ParallelFor, VisitsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(ParallelFor, PropagatesExceptions) {
  EXPECT_THROW(parallel_for(10, 3,
                            [](std::size_t i) {
                              if (i == 7) throw NumericalError("boom");
                            }),
               NumericalError);
}

TEST(WorkerCount, ReadsEnvironment) {
  setenv("BOUNCELAB_WORKERS", "3", 1);
  EXPECT_EQ(worker_count(), 3);
  setenv("BOUNCELAB_WORKERS", "zero", 1);
  EXPECT_GE(worker_count(), 1);
  unsetenv("BOUNCELAB_WORKERS");
}

TEST(Comparison, WorkerCountDoesNotChangeOutput) {
  const std::vector<double> bars{0.0, 0.02, 0.05, 0.08};
  ComparisonOptions o;
  o.numeric = false;
  o.workers = 1;
  std::ostringstream one, many;
  write_comparison_csv(one, run_comparison(lambda_points(bars), "lambda_bar", bars, o));
  o.workers = 3;
  write_comparison_csv(many, run_comparison(lambda_points(bars), "lambda_bar", bars, o));
  EXPECT_EQ(one.str(), many.str());
}

TEST(Comparison, UnperturbedRowAgrees) {
  const std::vector<double> bars{0.0};
  ComparisonOptions o;
  o.numeric = false;
  const auto rows = run_comparison(lambda_points(bars), "lambda_bar", bars, o);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(rows[0].perturbative / rows[0].t0, 1.0, 1e-6);
  EXPECT_NEAR(rows[0].secular / rows[0].t0, 1.0, 1e-6);
  EXPECT_TRUE(rows[0].flags.empty()) << rows[0].flags;
}

TEST(Comparison, FailuresBecomeFlags) {
  std::vector<RunConfig> pts{RunConfig{}};
  // put the packet on the m = 4 resonance of the perturbation series
  pts[0].secular_r = 1.0;
  const double n0 = n0_from_z0(pts[0].packet, pts[0].params);
  const double e = pts[0].params.mass * pts[0].params.gravity * pts[0].packet.z0;
  pts[0].params.omega = 4.0 * 2.0 * e / (3.0 * (n0 + 0.75) * pts[0].params.hbar);
  pts[0].params.lambda = 1e-9;
  ComparisonOptions o;
  o.numeric = false;
  const auto rows = run_comparison(pts, "omega_rad_s", {pts[0].params.omega}, o);
  EXPECT_NE(rows[0].flags.find("perturbative_near_resonance_m4"), std::string::npos) << rows[0].flags;
  EXPECT_NE(rows[0].flags.find("secular_band_edge"), std::string::npos) << rows[0].flags;
  EXPECT_TRUE(std::isnan(rows[0].perturbative));
}

TEST(Manifest, HashDependsOnConfigAndCommand) {
  RunConfig a;
  RunConfig b = a;
  EXPECT_EQ(make_manifest("propagate", a).input_hash, make_manifest("propagate", b).input_hash);
  b.params.lambda = 1e-9;
  EXPECT_NE(make_manifest("propagate", a).input_hash, make_manifest("propagate", b).input_hash);
  EXPECT_NE(make_manifest("figure1", a).input_hash, make_manifest("propagate", a).input_hash);
  EXPECT_EQ(make_manifest("x", a).input_hash.size(), 16u);
}

TEST(Propagation, SmallRunRevivesAndIsDeterministic) {
  const auto c = small_run();
  const auto a = run_propagation(c);
  ASSERT_TRUE(a.estimate.has_value()) << a.failure;
  EXPECT_NEAR(a.estimate->time / a.t0, 1.0, 0.03);
  EXPECT_LT(a.max_norm_error, 1e-9);
  const auto b = run_propagation(c);
  std::ostringstream ta, tb;
  write_trace_csv(ta, a.trace);
  write_trace_csv(tb, b.trace);
  EXPECT_EQ(ta.str(), tb.str());
}
