#include <gtest/gtest.h>

#include <sstream>

#include "bouncelab/config.hpp"
#include "bouncelab/errors.hpp"

using namespace bouncelab;

TEST(Config, DefaultsAreTheCesiumCavity) {
  const RunConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_DOUBLE_EQ(c.packet.z0, 20.1e-6);
  EXPECT_DOUBLE_EQ(c.packet.width, 0.28e-6);
  EXPECT_EQ(c.wall, WallMode::hard);
}

TEST(Config, ParsesKeysCommentsAndBlankLines) {
  std::istringstream in(
      "# higher packet\n"
      "z0_m = 29.8e-6\n"
      "\n"
      "drive_hz = 930   # modulation\n"
      "lambda_bar = 0.05\n"
      "rabi_eff_hz = 23.38e3\n"
      "wall = exponential\n"
      "resonance_order = 4\n");
  const auto c = parse_config(in);
  EXPECT_DOUBLE_EQ(c.packet.z0, 29.8e-6);
  EXPECT_NEAR(c.params.omega, 2 * M_PI * 930, 1e-9);
  EXPECT_NEAR(c.params.lambda * c.params.omega * c.params.omega / c.params.gravity, 0.05, 1e-15);
  EXPECT_NEAR(c.params.v0, c.params.hbar * 2 * M_PI * 23.38e3 / 4, 1e-40);
  EXPECT_EQ(c.wall, WallMode::exponential);
  ASSERT_TRUE(c.resonance_order.has_value());
  EXPECT_EQ(*c.resonance_order, 4);
}

TEST(Config, ErrorsNameKeyAndLine) {
  std::istringstream in("z0_m = 20e-6\n\ngrid_points = 1000\n");
  try {
    parse_config(in);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "grid_points");
    EXPECT_EQ(e.line(), 3);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(Config, RejectsMalformedInput) {
  for (const char* text : {"z0_m 20e-6\n", "z0_m = abc\n", "z0_m = -1\n", "colour = red\n",
                           "wall = soft\n", "dz_m = 0\n"}) {
    std::istringstream in(text);
    EXPECT_THROW(parse_config(in), ConfigError) << text;
  }
}

TEST(Config, OverridesApplyInOrder) {
  RunConfig c;
  set_config_value(c, "lambda_m", "1e-8");
  set_config_value(c, "secular_r", "0.77");
  set_config_value(c, "secular_r", "auto");
  EXPECT_DOUBLE_EQ(c.params.lambda, 1e-8);
  EXPECT_FALSE(c.secular_r.has_value());
  EXPECT_THROW(set_config_value(c, "nope", "1"), ConfigError);
}

TEST(Config, TextRoundTrip) {
  RunConfig c;
  set_config_value(c, "z0_m", "29.8e-6");
  set_config_value(c, "lambda_bar", "0.07");
  set_config_value(c, "resonance_order", "5");
  const std::string text = to_text(c);
  std::istringstream in(text);
  const auto back = parse_config(in);
  EXPECT_EQ(to_text(back), text);
  EXPECT_EQ(back.params.lambda, c.params.lambda);
}

TEST(Config, ValidateCatchesInconsistentWindow) {
  RunConfig c;
  c.window_lo = 1.4;
  EXPECT_THROW(c.validate(), ConfigError);
  c = RunConfig{};
  c.z_max = 10e-6;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Config, WallRoundingIsAutoOrPositive) {
  RunConfig c;
  EXPECT_FALSE(c.wall_rounding.has_value());
  set_config_value(c, "wall_rounding_m", "1.5e-7");
  ASSERT_TRUE(c.wall_rounding.has_value());
  EXPECT_DOUBLE_EQ(*c.wall_rounding, 1.5e-7);
  std::istringstream text(to_text(c));
  EXPECT_DOUBLE_EQ(*parse_config(text).wall_rounding, 1.5e-7);
  set_config_value(c, "wall_rounding_m", "auto");
  EXPECT_FALSE(c.wall_rounding.has_value());
  EXPECT_THROW(set_config_value(c, "wall_rounding_m", "-1e-7"), ConfigError);
}
