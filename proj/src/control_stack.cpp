#include "odd/control_stack.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "odd/errors.hpp"

namespace odd {

namespace {

void require_positive_dt(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorCode::kNonPositiveDt, fmt::format("dt = {} s must be > 0", dt));
  }
}

}  // namespace

void PidGains::validate() const {
  if (!(output_min < output_max)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("PID output_min {} must be < output_max {}", output_min, output_max));
  }
  if (!(integral_limit >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "PID integral_limit must be >= 0");
  }
  if (!(derivative_filter_tau >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "PID derivative_filter_tau must be >= 0");
  }
}

double pid_step(const PidGains& g, PidState& s, double setpoint, double measurement,
                std::optional<double> measurement_rate, double dt) {
  require_positive_dt(dt);
  const double error = setpoint - measurement;

  double rate = 0.0;
  if (measurement_rate) {
    rate = *measurement_rate;
  } else if (s.has_previous) {
    rate = (measurement - s.previous_measurement) / dt;
  }
  const double raw_derivative = -rate;
  const double tau = g.derivative_filter_tau;
  s.filtered_derivative =
      tau > 0.0 ? (tau * s.filtered_derivative + dt * raw_derivative) / (tau + dt) : raw_derivative;
  s.previous_measurement = measurement;
  s.has_previous = true;

  const double p = g.kp * error;
  const double d = g.kd * s.filtered_derivative;
  const double candidate =
      std::clamp(s.integral + g.ki * error * dt, -g.integral_limit, g.integral_limit);

  const double unsaturated = p + candidate + d;
  const bool pushes_high = unsaturated > g.output_max && g.ki * error > 0.0;
  const bool pushes_low = unsaturated < g.output_min && g.ki * error < 0.0;
  // Conditional integration: no accumulation while the output is pinned and
  // the error drives it further into the limit.
  if (!pushes_high && !pushes_low) s.integral = candidate;

  const double raw = p + s.integral + d;
  const double out = std::clamp(raw, g.output_min, g.output_max);
  s.saturated = out != raw;
  return out;
}

double wrap_angle(double a) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double r = std::remainder(a, kTwoPi);  // [-pi, pi]
  if (r <= -std::numbers::pi) r += kTwoPi;
  return r;
}

BalancingController::BalancingController(const CascadeGains& gains, double wheel_radius)
    : position_(gains.position), speed_(gains.speed), wheel_radius_(wheel_radius) {}

double BalancingController::step(double pitch, double avg_wheel_rate, double dt,
                                 std::optional<double> pitch_rate) {
  require_positive_dt(dt);
  // The pitch loop is written against -pitch so that a forward lean yields a
  // positive (forward) speed demand.
  std::optional<double> neg_rate;
  if (pitch_rate) neg_rate = -*pitch_rate;
  const double demand = position_.step(0.0, -pitch, dt, neg_rate);
  position_tel_ = {0.0, pitch, demand};

  // Speed feedback enters with positive sign: a velocity-commanded inverted
  // pendulum is only stabilizable if excess forward speed asks for more
  // forward speed (the robot must lean back before it can slow down).
  const double speed_error = wheel_radius_ * avg_wheel_rate - velocity_reference_;
  const double out = speed_.step(demand, -speed_error, dt);
  speed_tel_ = {demand, speed_error, out};
  return out;
}

void BalancingController::reset() {
  position_.reset();
  speed_.reset();
  position_tel_ = speed_tel_ = {};
}

SteeringController::SteeringController(const CascadeGains& gains)
    : position_(gains.position), speed_(gains.speed) {}

double SteeringController::step(double yaw, double yaw_rate, double yaw_setpoint, double dt) {
  require_positive_dt(dt);
  last_error_ = wrap_angle(yaw_setpoint - yaw);
  // Derivative on measurement via the gyro rate, so the wrapped error can be
  // fed as the setpoint against a zero measurement.
  const double rate_target = position_.step(last_error_, 0.0, dt, yaw_rate);
  position_tel_ = {yaw_setpoint, yaw, rate_target};
  const double out = speed_.step(rate_target + rate_reference_, yaw_rate, dt);
  speed_tel_ = {rate_target + rate_reference_, yaw_rate, out};
  return out;
}

void SteeringController::reset() {
  position_.reset();
  speed_.reset();
  last_error_ = 0.0;
  position_tel_ = speed_tel_ = {};
}

DistanceController::DistanceController(const CascadeGains& gains, double d_min, double d_max)
    : position_(gains.position), speed_(gains.speed), d_min_(d_min), d_max_(d_max) {
  if (!(d_min > 0.0 && d_min < d_max)) {
    throw Error(ErrorCode::kInvalidArgument, "distance controller needs 0 < d_min < d_max");
  }
}

double DistanceController::step(double d_meas, double d_rate, double d_setpoint, double dt) {
  require_positive_dt(dt);
  if (!(d_setpoint >= d_min_ && d_setpoint <= d_max_)) {
    throw Error(ErrorCode::kSetpointOutOfRange,
                fmt::format("spacing setpoint {:.9g} m outside [{:.9g}, {:.9g}] m", d_setpoint,
                            d_min_, d_max_));
  }
  const double rate_target = position_.step(d_setpoint, d_meas, dt, d_rate);
  position_tel_ = {d_setpoint, d_meas, rate_target};
  double out = speed_.step(rate_target + rate_reference_, d_rate, dt);
  const double lo = (d_min_ - d_meas) / dt - rate_reference_;
  const double hi = (d_max_ - d_meas) / dt - rate_reference_;
  out = std::clamp(out, std::min(lo, hi), std::max(lo, hi));
  speed_tel_ = {rate_target + rate_reference_, d_rate, out};
  return out;
}

void DistanceController::reset() {
  position_.reset();
  speed_.reset();
  position_tel_ = speed_tel_ = {};
}

namespace {

PidGains with_current_limit(PidGains g, double limit) {
  if (!(limit > 0.0)) throw Error(ErrorCode::kInvalidArgument, "current limit must be > 0");
  g.output_min = std::max(g.output_min, -limit);
  g.output_max = std::min(g.output_max, limit);
  return g;
}

}  // namespace

MotorSpeedLoop::MotorSpeedLoop(const PidGains& gains, double current_limit)
    : pid_(with_current_limit(gains, current_limit)) {}

double MotorSpeedLoop::step(double target_rate, double measured_rate, double dt) {
  return pid_.step(target_rate, measured_rate, dt);
}

SpeedCommand SpeedLimits::clamp(const SpeedCommand& c) const {
  return {std::clamp(c.vx, -vx, vx), std::clamp(c.vy, -vy, vy), std::clamp(c.wz, -wz, wz),
          std::clamp(c.d_dot, -d_dot, d_dot)};
}

WheelRates command_mixer(const SpeedCommand& ext, double balance_vx, double steer_wz,
                         double dist_d_dot, const Geometry& geom, double d) {
  const BodyTwist total{ext.vx + balance_vx, ext.vy, ext.wz + steer_wz, ext.d_dot + dist_d_dot};
  return wheels_from_body(total, geom, d);
}

ControlConfig ControlConfig::defaults() {
  ControlConfig c;
  c.balancing.position = {.kp = 5.0, .ki = 0.0, .kd = 0.2, .output_min = -2.0, .output_max = 2.0};
  c.balancing.speed = {.kp = 0.5,
                       .ki = 10.0,
                       .kd = 0.0,
                       .output_min = -1.5,
                       .output_max = 1.5,
                       .integral_limit = 1.5};
  c.steering.position = {.kp = 4.0, .ki = 0.0, .kd = 0.0, .output_min = -2.0, .output_max = 2.0};
  c.steering.speed = {.kp = 0.5,
                      .ki = 10.0,
                      .kd = 0.0,
                      .output_min = -2.0,
                      .output_max = 2.0,
                      .integral_limit = 2.0};
  c.distance.position = {.kp = 3.0, .ki = 0.0, .kd = 0.0, .output_min = -0.2, .output_max = 0.2};
  c.distance.speed = {.kp = 0.5,
                      .ki = 10.0,
                      .kd = 0.0,
                      .output_min = -0.2,
                      .output_max = 0.2,
                      .integral_limit = 0.2};
  c.motor_speed = {.kp = 0.3, .ki = 6.0, .kd = 0.0, .integral_limit = 20.0};
  return c;
}

}  // namespace odd
