#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "odd/config.hpp"
#include "odd/errors.hpp"

using namespace odd;

TEST(Config, EmptyTextGivesDefaults) {
  const AppConfig c = parse_config("");
  EXPECT_DOUBLE_EQ(c.geometry.r, 0.05);
  EXPECT_DOUBLE_EQ(c.control.balancing.position.kp, ControlConfig::defaults().balancing.position.kp);
  EXPECT_DOUBLE_EQ(c.sim.dt, 1e-3);
  EXPECT_EQ(c.sim.seed, 42u);
}

TEST(Config, PartialOverride) {
  const AppConfig c = parse_config(
      "geometry:\n"
      "  w: 0.25\n"
      "  alpha_deg: [30, -30, 30, -30]\n"
      "gains:\n"
      "  steering:\n"
      "    position: {kp: 7}\n"
      "sim:\n"
      "  integrator: euler\n"
      "  actuator: {mode: motor}\n"
      "  disturbances:\n"
      "    - {t_start: 1, t_end: 2, wz_bias: 0.1}\n");
  EXPECT_DOUBLE_EQ(c.geometry.w, 0.25);
  EXPECT_NEAR(c.geometry.alpha[1], -std::numbers::pi / 6, 1e-15);
  EXPECT_DOUBLE_EQ(c.control.steering.position.kp, 7.0);
  EXPECT_DOUBLE_EQ(c.control.steering.speed.kp, ControlConfig::defaults().steering.speed.kp);
  EXPECT_EQ(c.sim.integrator, Integrator::kEuler);
  EXPECT_EQ(c.sim.actuator.mode, ActuatorMode::kMotor);
  ASSERT_EQ(c.sim.disturbances.size(), 1u);
  EXPECT_DOUBLE_EQ(c.sim.disturbances[0].wz_bias, 0.1);
}

TEST(Config, SerializeRoundTrip) {
  AppConfig c;
  c.geometry.r = 0.06;
  c.control.distance_enabled = false;
  c.control.motor_speed.ki = 3.5;
  c.sim.duration = 12.5;
  c.sim.noise.enabled = true;
  c.sim.disturbances.push_back({0.5, 1.0, -0.05});
  const std::string text = serialize_config(c);
  const AppConfig back = parse_config(text);
  EXPECT_EQ(serialize_config(back), text);
  EXPECT_DOUBLE_EQ(back.geometry.r, 0.06);
  EXPECT_FALSE(back.control.distance_enabled);
  EXPECT_TRUE(std::isinf(back.control.balancing.position.integral_limit));
  ASSERT_TRUE(back.sim.duration.has_value());
  EXPECT_DOUBLE_EQ(*back.sim.duration, 12.5);
  EXPECT_NEAR(back.geometry.alpha[0], std::numbers::pi / 4, 1e-15);
}

TEST(Config, DefaultsDumpListsEverySection) {
  const std::string text = serialize_config(AppConfig{});
  for (const char* key : {"geometry:", "gains:", "sim:", "balancing:", "steering:", "distance:",
                          "motor_speed:", "actuator:", "pendulum:", "noise:", "alpha_deg:"}) {
    EXPECT_NE(text.find(key), std::string::npos) << key;
  }
}

TEST(Config, UnknownKeyReportsLine) {
  try {
    parse_config("geometry:\n  r: 0.05\n  radius: 3\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Config, BadValues) {
  EXPECT_THROW(parse_config("sim:\n  integrator: midpoint\n"), Error);
  EXPECT_THROW(parse_config("sim:\n  dt: -1\n"), Error);
  EXPECT_THROW(parse_config("geometry:\n  alpha_deg: [1, 2]\n"), Error);
  EXPECT_THROW(parse_config("gains:\n  steering:\n    speed: {kp: x}\n"), Error);
  EXPECT_THROW(parse_config("gains: [1, 2\n"), Error);
  EXPECT_THROW(load_config_file("/nonexistent/odd.yaml"), Error);
}
