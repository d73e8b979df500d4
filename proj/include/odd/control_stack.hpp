#pragma once

#include <array>
#include <limits>
#include <optional>

#include "odd/mecanum_kinematics.hpp"
#include "odd/types.hpp"

namespace odd {

struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
  double output_min = -std::numeric_limits<double>::infinity();
  double output_max = std::numeric_limits<double>::infinity();
  /// Bound on the magnitude of the integral term (already scaled by ki).
  double integral_limit = std::numeric_limits<double>::infinity();
  /// First-order low-pass time constant on the derivative term, s. 0 = off.
  double derivative_filter_tau = 0.0;

  /// Throws Error(kInvalidArgument) if the invariants do not hold.
  void validate() const;
};

struct PidState {
  double integral = 0.0;
  double filtered_derivative = 0.0;
  double previous_measurement = 0.0;
  bool has_previous = false;
  bool saturated = false;

  void reset() { *this = PidState{}; }
};

/// One step of a discrete PID: backward-Euler integral with conditional
/// integration, derivative on measurement (from `measurement_rate` when the
/// caller has it, else a finite difference), first-order derivative filter and
/// output clamp. Throws Error(kNonPositiveDt).
double pid_step(const PidGains& gains, PidState& state, double setpoint, double measurement,
                std::optional<double> measurement_rate, double dt);

class Pid {
 public:
  Pid() = default;
  explicit Pid(const PidGains& gains) : gains_(gains) { gains_.validate(); }

  double step(double setpoint, double measurement, double dt,
              std::optional<double> measurement_rate = std::nullopt) {
    return pid_step(gains_, state_, setpoint, measurement, measurement_rate, dt);
  }
  void reset() { state_.reset(); }

  const PidGains& gains() const { return gains_; }
  const PidState& state() const { return state_; }
  bool saturated() const { return state_.saturated; }

 private:
  PidGains gains_;
  PidState state_;
};

/// Outer position-loop PD feeding an inner speed-loop PI.
struct CascadeGains {
  PidGains position;
  PidGains speed;
};

struct LoopTelemetry {
  double setpoint = 0.0;
  double measurement = 0.0;
  double output = 0.0;
};

/// Keeps the pitch at zero by adding a forward speed correction.
class BalancingController {
 public:
  BalancingController(const CascadeGains& gains, double wheel_radius);

  /// Reference for the forward speed the platform is commanded to hold; the
  /// speed loop regulates deviations from it.
  void set_velocity_reference(double vx) { velocity_reference_ = vx; }

  /// Returns the vx correction, m/s. `avg_wheel_rate` is the mean encoder rate
  /// of the four wheels. Throws Error(kNonPositiveDt).
  double step(double pitch, double avg_wheel_rate, double dt,
              std::optional<double> pitch_rate = std::nullopt);

  void reset();
  bool saturated() const { return position_.saturated() || speed_.saturated(); }
  const LoopTelemetry& position_telemetry() const { return position_tel_; }
  const LoopTelemetry& speed_telemetry() const { return speed_tel_; }

 private:
  Pid position_;
  Pid speed_;
  double wheel_radius_;
  double velocity_reference_ = 0.0;
  LoopTelemetry position_tel_;
  LoopTelemetry speed_tel_;
};

/// Wrap an angle into (-pi, pi].
double wrap_angle(double a);

/// Holds heading; returns a wz correction, rad/s.
class SteeringController {
 public:
  explicit SteeringController(const CascadeGains& gains);

  /// Commanded turn rate; the rate loop tracks the heading correction on top.
  void set_rate_reference(double wz) { rate_reference_ = wz; }

  double step(double yaw, double yaw_rate, double yaw_setpoint, double dt);

  void reset();
  bool saturated() const { return position_.saturated() || speed_.saturated(); }
  /// Last wrapped heading error, always in (-pi, pi].
  double last_error() const { return last_error_; }
  const LoopTelemetry& position_telemetry() const { return position_tel_; }
  const LoopTelemetry& speed_telemetry() const { return speed_tel_; }

 private:
  Pid position_;
  Pid speed_;
  double rate_reference_ = 0.0;
  double last_error_ = 0.0;
  LoopTelemetry position_tel_;
  LoopTelemetry speed_tel_;
};

/// Regulates the measured draw-wire spacing; returns a d_dot correction, m/s,
/// limited so that d + correction * dt stays within [d_min, d_max].
class DistanceController {
 public:
  DistanceController(const CascadeGains& gains, double d_min, double d_max);

  /// Commanded spacing rate; the correction is added on top of it.
  void set_rate_reference(double d_dot) { rate_reference_ = d_dot; }

  /// Throws Error(kSetpointOutOfRange) for setpoints outside [d_min, d_max].
  double step(double d_meas, double d_rate, double d_setpoint, double dt);

  void reset();
  bool saturated() const { return position_.saturated() || speed_.saturated(); }
  const LoopTelemetry& position_telemetry() const { return position_tel_; }
  const LoopTelemetry& speed_telemetry() const { return speed_tel_; }

 private:
  Pid position_;
  Pid speed_;
  double d_min_;
  double d_max_;
  double rate_reference_ = 0.0;
  LoopTelemetry position_tel_;
  LoopTelemetry speed_tel_;
};

/// Per-wheel speed PI producing a current command clamped to +/- I_max; the
/// current loop beneath it is taken as ideal.
class MotorSpeedLoop {
 public:
  MotorSpeedLoop(const PidGains& gains, double current_limit);

  double step(double target_rate, double measured_rate, double dt);

  void reset() { pid_.reset(); }
  bool saturated() const { return pid_.saturated(); }

 private:
  Pid pid_;
};

/// Host or scenario command.
struct SpeedCommand {
  double vx = 0.0;
  double vy = 0.0;
  double wz = 0.0;
  double d_dot = 0.0;

  BodyTwist twist() const { return {vx, vy, wz, d_dot}; }
};

struct SpeedLimits {
  double vx = 1.5;
  double vy = 1.5;
  double wz = 3.0;
  double d_dot = 0.2;

  SpeedCommand clamp(const SpeedCommand& c) const;
};

/// Sums external command and controller corrections into one body twist and
/// maps it to per-wheel target rates.
WheelRates command_mixer(const SpeedCommand& ext, double balance_vx, double steer_wz,
                         double dist_d_dot, const Geometry& geom, double d);

/// Gains and loop rates of the whole stack. None of these are published
/// values; they are tuned against the simulator's toy plant.
struct ControlConfig {
  CascadeGains balancing;
  CascadeGains steering;
  CascadeGains distance;
  PidGains motor_speed;
  double current_limit = 20.0;  // A
  double outer_rate_hz = 200.0;
  double motor_rate_hz = 1000.0;
  SpeedLimits limits;
  /// Slew limit applied to the external command in closed loop, m/s^2 on
  /// vx/vy.
  double command_accel_limit = 1.0;
  bool balancing_enabled = true;
  bool steering_enabled = true;
  bool distance_enabled = true;

  static ControlConfig defaults();
};

}  // namespace odd
