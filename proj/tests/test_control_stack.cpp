#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "odd/control_stack.hpp"
#include "odd/errors.hpp"
#include "odd/simulator.hpp"
#include "odd/verification.hpp"

using namespace odd;

namespace {

constexpr double kPi = std::numbers::pi;

PidGains pid(double kp, double ki, double kd) {
  PidGains g;
  g.kp = kp;
  g.ki = ki;
  g.kd = kd;
  return g;
}

}  // namespace

TEST(Pid, ProportionalOnly) {
  Pid p(pid(1, 0, 0));
  EXPECT_DOUBLE_EQ(p.step(1.0, 0.5, 0.01), 0.5);
}

TEST(Pid, BackwardEulerIntegral) {
  Pid p(pid(0, 1, 0));
  double out = 0.0;
  for (int i = 0; i < 10; ++i) out = p.step(1.0, 0.0, 0.1);
  EXPECT_NEAR(out, 1.0, 1e-12);
}

TEST(Pid, SaturationFreezesIntegral) {
  PidGains g = pid(0.5, 1.0, 0);
  g.output_max = 0.3;
  PidState s;
  const double out = pid_step(g, s, 1.0, 0.0, std::nullopt, 0.1);
  EXPECT_DOUBLE_EQ(out, 0.3);
  EXPECT_TRUE(s.saturated);
  EXPECT_DOUBLE_EQ(s.integral, 0.0);
  for (int i = 0; i < 50; ++i) pid_step(g, s, 1.0, 0.0, std::nullopt, 0.1);
  EXPECT_DOUBLE_EQ(s.integral, 0.0);
}

TEST(Pid, AntiWindupRecoversImmediately) {
  // With windup the output would stay pinned long after the error reverses.
  PidGains g = pid(0.1, 1.0, 0);
  g.output_min = -1.0;
  g.output_max = 1.0;
  PidState s;
  for (int i = 0; i < 1000; ++i) pid_step(g, s, 1.0, 0.0, std::nullopt, 0.01);
  EXPECT_LE(s.integral, 1.0 + 1e-12);
  const double out = pid_step(g, s, -1.0, 0.0, std::nullopt, 0.01);
  EXPECT_LT(out, 1.0);
}

TEST(Pid, IntegralLimit) {
  PidGains g = pid(0, 1, 0);
  g.integral_limit = 0.25;
  PidState s;
  for (int i = 0; i < 100; ++i) pid_step(g, s, 1.0, 0.0, std::nullopt, 0.1);
  EXPECT_DOUBLE_EQ(s.integral, 0.25);
}

TEST(Pid, DerivativeOnMeasurement) {
  Pid p(pid(0, 0, 2.0));
  EXPECT_DOUBLE_EQ(p.step(0.0, 0.0, 0.1), 0.0);
  // Measurement rising at 1/s: derivative term -kd * 1.
  EXPECT_NEAR(p.step(0.0, 0.1, 0.1), -2.0, 1e-12);
  // Setpoint jumps do not kick the derivative.
  EXPECT_NEAR(p.step(5.0, 0.2, 0.1), -2.0, 1e-12);
  Pid q(pid(0, 0, 2.0));
  EXPECT_NEAR(q.step(0.0, 0.0, 0.1, 0.5), -1.0, 1e-12);
}

TEST(Pid, DerivativeFilter) {
  PidGains g = pid(0, 0, 1.0);
  g.derivative_filter_tau = 0.1;
  Pid p(g);
  // Backward-Euler low-pass: y = (tau y + dt x) / (tau + dt), x = -1.
  const double out = p.step(0.0, 0.0, 0.1, 1.0);
  EXPECT_NEAR(out, -0.5, 1e-12);
}

TEST(Pid, RejectsBadInput) {
  Pid p(pid(1, 0, 0));
  try {
    p.step(1, 0, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonPositiveDt);
  }
  PidGains g = pid(1, 0, 0);
  g.output_min = 1;
  g.output_max = -1;
  EXPECT_THROW(g.validate(), Error);
}

TEST(Pid, Linearity) {
  Pid a(pid(0.7, 2.0, 0.1));
  Pid b(pid(0.7, 2.0, 0.1));
  for (int i = 0; i < 20; ++i) {
    const double e = std::sin(0.3 * i);
    const double m = std::cos(0.2 * i);
    EXPECT_NEAR(2.0 * a.step(e, m, 0.01), b.step(2 * e, 2 * m, 0.01), 1e-12);
  }
}

TEST(WrapAngle, Range) {
  EXPECT_NEAR(wrap_angle(kPi), kPi, 1e-15);
  EXPECT_NEAR(wrap_angle(-kPi), kPi, 1e-15);
  EXPECT_NEAR(wrap_angle(3 * kPi), kPi, 1e-12);
  EXPECT_NEAR(wrap_angle(2 * kPi - 0.2), -0.2, 1e-12);
  for (double a = -20.0; a < 20.0; a += 0.37) {
    const double w = wrap_angle(a);
    EXPECT_GT(w, -kPi);
    EXPECT_LE(w, kPi);
    EXPECT_NEAR(std::remainder(w - a, 2 * kPi), 0.0, 1e-12);
  }
}

TEST(Balancing, EquilibriumGivesZero) {
  BalancingController b(ControlConfig::defaults().balancing, 0.05);
  EXPECT_DOUBLE_EQ(b.step(0.0, 0.0, 0.005, 0.0), 0.0);
}

TEST(Balancing, DrivesUnderTheFall) {
  BalancingController b(ControlConfig::defaults().balancing, 0.05);
  EXPECT_GT(b.step(5.0 * kPi / 180.0, 0.0, 0.005, 0.0), 0.0);
  BalancingController c(ControlConfig::defaults().balancing, 0.05);
  EXPECT_LT(c.step(-5.0 * kPi / 180.0, 0.0, 0.005, 0.0), 0.0);
}

TEST(Balancing, CorrectionDecaysAfterDisturbance) {
  const Geometry g = Geometry::defaults();
  SimConfig cfg;
  cfg.pendulum.enabled = true;
  const auto log = run_closed_loop(balance_scenario(5.0 * kPi / 180.0, 6.0),
                                   ControlConfig::defaults(), g, cfg);
  ASSERT_FALSE(log.telemetry.empty());
  double peak = 0.0;
  for (const auto& t : log.telemetry) peak = std::max(peak, std::abs(t.balance_speed.output));
  EXPECT_GT(peak, 0.01);
  EXPECT_LT(std::abs(log.telemetry.back().balance_speed.output), 1e-3);
  EXPECT_LT(std::abs(log.rows.back().pose.pitch), 1e-4);
}

TEST(Steering, AtSetpointGivesZero) {
  SteeringController s(ControlConfig::defaults().steering);
  EXPECT_DOUBLE_EQ(s.step(0.3, 0.0, 0.3, 0.005), 0.0);
}

TEST(Steering, TakesTheShortWay) {
  SteeringController s(ControlConfig::defaults().steering);
  const double out = s.step(-kPi + 0.1, 0.0, kPi - 0.1, 0.005);
  EXPECT_NEAR(s.last_error(), -0.2, 1e-12);
  EXPECT_LT(out, 0.0);
}

TEST(Steering, ProportionalOuterLoop) {
  auto run = [](double kp) {
    CascadeGains g;
    g.position = pid(kp, 0, 0);
    g.speed = pid(1, 0, 0);
    SteeringController s(g);
    return s.step(0.0, 0.0, 0.1, 0.005);
  };
  EXPECT_NEAR(run(2.0), 0.2, 1e-12);
  EXPECT_NEAR(run(4.0), 0.4, 1e-12);
}

TEST(Distance, AtSetpointGivesZero) {
  DistanceController d(ControlConfig::defaults().distance, 0.25, 0.8);
  EXPECT_DOUBLE_EQ(d.step(0.5, 0.0, 0.5, 0.005), 0.0);
}

TEST(Distance, WidensTowardSetpoint) {
  DistanceController d(ControlConfig::defaults().distance, 0.25, 0.8);
  EXPECT_GT(d.step(0.4, 0.0, 0.6, 0.005), 0.0);
}

TEST(Distance, SetpointBounds) {
  DistanceController d(ControlConfig::defaults().distance, 0.25, 0.8);
  try {
    d.step(0.4, 0.0, 0.2, 0.005);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSetpointOutOfRange);
  }
  EXPECT_THROW(d.step(0.4, 0.0, 0.81, 0.005), Error);
}

TEST(Distance, CorrectionKeepsSpacingInRange) {
  CascadeGains g;
  g.position = pid(100, 0, 0);
  g.speed = pid(100, 0, 0);
  DistanceController d(g, 0.25, 0.8);
  const double dt = 0.005;
  const double out = d.step(0.79, 0.0, 0.8, dt);
  EXPECT_LE(0.79 + out * dt, 0.8 + 1e-12);
}

TEST(Mixer, Examples) {
  const Geometry g = Geometry::defaults();
  const WheelRates zero = command_mixer({}, 0, 0, 0, g, 0.4);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(zero[i], 0.0);
  const WheelRates fwd = command_mixer({1, 0, 0, 0}, 0, 0, 0, g, 0.4);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(fwd[i], 20.0, 1e-12);
  const WheelRates bal = command_mixer({}, 0.5, 0, 0, g, 0.4);
  const WheelRates ref = wheels_from_body({0.5, 0, 0, 0}, g, 0.4);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(bal[i], ref[i], 1e-12);
}

TEST(Mixer, Superposition) {
  const Geometry g = Geometry::defaults();
  const WheelRates all = command_mixer({0.1, 0.2, 0.3, 0.04}, 0.05, -0.2, 0.01, g, 0.5);
  const WheelRates parts = wheels_from_body({0.1, 0.2, 0.3, 0.04}, g, 0.5) +
                           wheels_from_body({0.05, 0, -0.2, 0.01}, g, 0.5);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(all[i], parts[i], 1e-12);
}

TEST(SpeedLimits, Clamp) {
  const SpeedLimits l;
  const SpeedCommand c = l.clamp({5, -5, 10, -1});
  EXPECT_DOUBLE_EQ(c.vx, l.vx);
  EXPECT_DOUBLE_EQ(c.vy, -l.vy);
  EXPECT_DOUBLE_EQ(c.wz, l.wz);
  EXPECT_DOUBLE_EQ(c.d_dot, -l.d_dot);
}

TEST(MotorSpeedLoop, AtTargetGivesZero) {
  MotorSpeedLoop m(ControlConfig::defaults().motor_speed, 20.0);
  EXPECT_DOUBLE_EQ(m.step(10.0, 10.0, 0.001), 0.0);
}

TEST(MotorSpeedLoop, CurrentClamp) {
  MotorSpeedLoop m(ControlConfig::defaults().motor_speed, 20.0);
  EXPECT_DOUBLE_EQ(m.step(1e6, 0.0, 0.001), 20.0);
  EXPECT_TRUE(m.saturated());
  MotorSpeedLoop n(ControlConfig::defaults().motor_speed, 20.0);
  EXPECT_DOUBLE_EQ(n.step(-1e6, 0.0, 0.001), -20.0);
}

TEST(MotorSpeedLoop, StepSettlesOnFirstOrderMotor) {
  // Plant J w' = kt i - b w, stepped exactly for constant current.
  const double J = 0.002, kt = 0.3, b = 1e-3, dt = 1e-3;
  MotorSpeedLoop m(ControlConfig::defaults().motor_speed, 20.0);
  double w = 0.0;
  double worst_late = 0.0;
  for (int k = 0; k < 2000; ++k) {
    const double i = m.step(20.0, w, dt);
    const double a = b / J;
    const double e = std::exp(-a * dt);
    w = w * e + (kt * i / b) * (1.0 - e);
    if (k >= 1000) worst_late = std::max(worst_late, std::abs(w - 20.0));
  }
  EXPECT_LT(worst_late, 0.2);
}
