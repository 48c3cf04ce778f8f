#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "bouncelab/errors.hpp"
#include "bouncelab/spectrum.hpp"
#include "oracles.hpp"

using namespace bouncelab;

namespace {
const PhysicalParams grav = PhysicalParams::gravitational();
}

TEST(AiryZero, MatchesTabulatedValues) {
  EXPECT_NEAR(airy_zero(0), oracle::airy_zero_1, 1e-13);
  EXPECT_NEAR(airy_zero(1), oracle::airy_zero_2, 1e-13);
  EXPECT_NEAR(airy_zero(2), oracle::airy_zero_3, 1e-13);
}

TEST(AiryZero, MatchesNewtonOracleAtLargeIndex) {
  for (int n : {10, 100, 176, 500, 1000}) {
    const double z = airy_zero(n);
    EXPECT_NEAR(z, oracle::airy_zero_newton(z + 1e-3), 1e-11 * z) << n;
  }
}

TEST(AiryZero, ZerosAreIncreasingAndSeparated) {
  double prev = 0.0;
  for (int n = 0; n < 300; ++n) {
    const double z = airy_zero(n);
    EXPECT_GT(z, prev);
    prev = z;
  }
}

TEST(Levels, GravitationalUnitsGroundState) {
  EXPECT_NEAR(energy_semiclassical(0, grav), 1.8418, 1e-3);
  EXPECT_NEAR(energy_airy_exact(0, grav), 1.85576, 1e-5);
  EXPECT_NEAR(energy_airy_exact(0, grav), oracle::airy_zero_1 / std::cbrt(2.0), 1e-13);
}

TEST(Levels, SemiclassicalApproachesExactForLargeN) {
  for (int n = 100; n <= 500; ++n) {
    const double e = energy_airy_exact(n, grav);
    EXPECT_LT(std::abs(energy_semiclassical(n, grav) - e) / e, 1e-4) << n;
  }
}

TEST(Levels, CurvatureMatchesFiniteDifference) {
  const double n = 176.16;
  const double h = 1e-2;
  const double fd = (energy_semiclassical(n + h, grav) - 2.0 * energy_semiclassical(n, grav) +
                     energy_semiclassical(n - h, grav)) / (h * h);
  EXPECT_NEAR(energy_semiclassical_curvature(n, grav) / fd, 1.0, 1e-6);
  EXPECT_LT(energy_semiclassical_curvature(n, grav), 0.0);
}

TEST(Levels, RejectsBelowMinusThreeQuarters) {
  EXPECT_THROW(energy_semiclassical(-0.8, grav), DomainError);
  EXPECT_NO_THROW(energy_semiclassical(-0.75, grav));
}

TEST(MatrixElements, BohrAgreesWithQuadratureNearN176) {
  const int n = 176;
  const double an = airy_zero(n);
  for (int m = -5; m <= 5; ++m) {
    if (m == 0) continue;
    const double exact = oracle::dipole_quadrature(an, airy_zero(n + m));
    const double bohr = matrix_element_bohr(n, m, grav);
    EXPECT_LT(std::abs(std::abs(bohr) - std::abs(exact)) / std::abs(exact), 0.01) << "m = " << m;
  }
}

TEST(MatrixElements, SignAndDomain) {
  EXPECT_LT(matrix_element_bohr(50, 3, grav), 0.0);
  EXPECT_THROW(matrix_element_bohr(50, 0, grav), DomainError);
  EXPECT_THROW(matrix_element_bohr(5, -6, grav), DomainError);
}

TEST(ActionAngle, FrequencyIsBouncePeriod) {
  const PhysicalParams p;
  const double e = p.mass * p.gravity * 20.1e-6;
  const auto s = action_from_energy(e, p);
  EXPECT_NEAR(s.energy / e, 1.0, 1e-12);
  EXPECT_NEAR(2.0 * M_PI / s.frequency / bounce_period(e, p), 1.0, 1e-12);
  const auto back = action_state(s.action, p);
  EXPECT_NEAR(back.energy / e, 1.0, 1e-12);
  // H'' = -(1/3) H' / I for H ~ I^(2/3)
  EXPECT_NEAR(s.anharmonicity / (-s.frequency / (3.0 * s.action)), 1.0, 1e-12);
}

TEST(SpectrumTable, CsvHasHeaderAndRows) {
  const auto t = build_spectrum_table(0, 4, grav);
  ASSERT_EQ(t.rows.size(), 5u);
  std::ostringstream os;
  write_spectrum_csv(os, t);
  const std::string s = os.str();
  EXPECT_EQ(s.substr(0, s.find('\n')), "n,E_semiclassical_J,E_airy_J,relative_gap");
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 6);
}
