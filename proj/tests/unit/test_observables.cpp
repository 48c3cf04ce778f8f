#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "bouncelab/errors.hpp"
#include "bouncelab/observables.hpp"

using namespace bouncelab;

namespace {

// |C| made of narrow pulses once per bounce period P whose height follows a
// Gaussian revival envelope centred on T, plus a half revival at T/2.
CorrelationTrace synthetic(double period, double revival, double dt, double t_end,
                           double half_height = 0.6, double floor = 0.2) {
  CorrelationTrace tr;
  for (double t = 0.0; t <= t_end + 1e-12; t += dt) {
    const double phase = std::fmod(t, period) / period;
    const double pulse = std::exp(-std::pow((std::min(phase, 1.0 - phase)) / 0.05, 2));
    auto bump = [&](double c, double w) { return std::exp(-std::pow((t - c) / w, 2)); };
    const double env = std::max({bump(0.0, 0.05 * revival), 0.8 * bump(revival, 0.02 * revival),
                                 half_height * bump(0.5 * revival, 0.02 * revival)});
    const double mag = std::min(1.0, floor + (env - floor * env) * pulse);
    tr.times.push_back(t);
    tr.values.emplace_back(t == 0.0 ? 1.0 : mag, 0.0);
  }
  return tr;
}

}  // namespace

TEST(Envelope, RemovesBounceOscillation) {
  const auto tr = synthetic(1.0, 400.0, 0.02, 500.0);
  const auto env = smoothed_envelope(tr, 1.0);
  ASSERT_EQ(env.size(), tr.size());
  // away from revivals the envelope is the pulse peak, flat to 1%
  const std::size_t i = static_cast<std::size_t>(300.0 / 0.02);
  EXPECT_NEAR(env[i], env[i + 25], 0.01);
}

TEST(Extraction, FindsRevivalTime) {
  const auto tr = synthetic(1.0, 400.0, 0.02, 540.0);
  ExtractionSettings s;
  s.smoothing_period = 1.0;
  const auto est = extract_revival_time(tr, 280.0, 520.0, s);
  EXPECT_EQ(est.method, RevivalMethod::numeric);
  EXPECT_NEAR(est.time, 400.0, 0.5);
  EXPECT_GT(est.peak_height, 0.75);
  EXPECT_GE(est.uncertainty, 0.02);
  EXPECT_LT(est.uncertainty, 5.0);
}

TEST(Extraction, FlatTraceHasNoRevival) {
  CorrelationTrace tr;
  for (int i = 0; i <= 10000; ++i) {
    tr.times.push_back(0.01 * i);
    tr.values.emplace_back(i == 0 ? 1.0 : 0.2 + 0.05 * std::sin(0.37 * i), 0.0);
  }
  ExtractionSettings s;
  s.smoothing_period = 0.5;
  EXPECT_THROW(extract_revival_time(tr, 40.0, 90.0, s), NoRevivalFound);
}

TEST(Extraction, WindowOutsideTraceIsRejected) {
  const auto tr = synthetic(1.0, 100.0, 0.05, 120.0);
  ExtractionSettings s;
  s.smoothing_period = 1.0;
  EXPECT_THROW(extract_revival_time(tr, 70.0, 130.0, s), InvalidParameter);
  EXPECT_THROW(extract_revival_time(tr, 90.0, 80.0, s), InvalidParameter);
}

TEST(Fractional, ReportsHalfRevival) {
  const auto tr = synthetic(1.0, 400.0, 0.02, 540.0);
  ExtractionSettings s;
  s.smoothing_period = 1.0;
  const auto full = extract_revival_time(tr, 280.0, 520.0, s);
  const auto frac = fractional_revival_times(tr, full, 3, s);
  bool half = false;
  for (const auto& f : frac)
    if (f.p == 1 && f.q == 2) {
      half = true;
      EXPECT_NEAR(f.time, 200.0, 1.0);
    }
  EXPECT_TRUE(half);
}

TEST(Trace, ValidateChecksInvariants) {
  auto tr = synthetic(1.0, 50.0, 0.1, 60.0);
  EXPECT_NO_THROW(tr.validate());
  auto bad = tr;
  bad.values[0] = 0.5;
  EXPECT_THROW(bad.validate(), InvalidParameter);
  bad = tr;
  bad.values[3] = 1.5;
  EXPECT_THROW(bad.validate(), InvalidParameter);
  bad = tr;
  bad.times[4] += 0.05;
  EXPECT_THROW(bad.validate(), InvalidParameter);
}

TEST(Trace, CsvRoundTrip) {
  auto tr = synthetic(1.0, 50.0, 0.1, 5.0);
  tr.values[7] = {0.25, -0.125};
  std::stringstream buf;
  write_trace_csv(buf, tr);
  const auto back = read_trace_csv(buf);
  ASSERT_EQ(back.size(), tr.size());
  for (std::size_t i = 0; i < tr.size(); ++i) {
    EXPECT_DOUBLE_EQ(back.times[i], tr.times[i]);
    EXPECT_EQ(back.values[i], tr.values[i]);
  }
  std::stringstream junk("time,value\n1,2\n");
  EXPECT_THROW(read_trace_csv(junk), InvalidParameter);
}

TEST(RevivalEstimate, JsonRoundTrip) {
  RevivalEstimate e;
  e.time = 4.3;
  e.method = RevivalMethod::secular;
  e.uncertainty = 0.01;
  e.peak_height = 0.0;
  const auto text = to_json(e);
  EXPECT_NE(text.find("\"T_s\""), std::string::npos);
  EXPECT_NE(text.find("\"uncertainty_s\""), std::string::npos);
  const auto back = revival_estimate_from_json(text);
  EXPECT_EQ(back.time, e.time);
  EXPECT_EQ(back.method, e.method);
  EXPECT_EQ(back.uncertainty, e.uncertainty);
  EXPECT_THROW(revival_method_from_string("guess"), InvalidParameter);
}
