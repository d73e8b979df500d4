#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "odd/control_stack.hpp"
#include "odd/mecanum_kinematics.hpp"
#include "odd/scenario.hpp"
#include "odd/types.hpp"

namespace odd {

enum class Integrator { kEuler, kRk4 };
enum class ActuatorMode { kIdeal, kLag, kMotor };

/// Wheel actuator abstraction. Ideal and lag modes act directly on rates;
/// motor mode drives a first-order motor plant J w' = kt i - b w through the
/// per-wheel speed PI.
struct ActuatorModel {
  ActuatorMode mode = ActuatorMode::kIdeal;
  double time_constant = 0.02;  // s, lag mode
  double rate_limit = 50.0;     // rad/s
  double accel_limit = std::numeric_limits<double>::infinity();  // rad/s^2
  double torque_constant = 0.3;    // N m / A at the wheel
  double inertia = 0.002;          // kg m^2 reflected to the wheel
  double viscous_friction = 1e-3;  // N m s
  double current_limit = 20.0;     // A

  void validate() const;
};

/// One actuator update in ideal or lag mode: backward-Euler first-order lag
/// toward the target, then acceleration and rate limits. Motor mode is handled
/// by Drivetrain.
WheelRates actuator_step(const WheelRates& target, const WheelRates& actual,
                         const ActuatorModel& model, double dt);

/// Planar wheeled inverted pendulum along B_x, used only to give the
/// balancing loop a plant.
struct PendulumParams {
  bool enabled = false;
  double com_height = 0.2;  // m
  double gravity = 9.81;    // m/s^2
  double damping = 0.5;     // 1/s
};

struct NoiseConfig {
  bool enabled = false;
  double draw_wire_rel_std = 0.001;  // fraction of d
  double imu_angle_std = 0.0;        // rad
  double imu_rate_std = 0.0;         // rad/s
  double encoder_std = 0.0;          // rad/s
};

/// Synthetic yaw-rate bias active on [t_start, t_end).
struct DisturbanceWindow {
  double t_start = 0.0;
  double t_end = 0.0;
  double wz_bias = 0.0;  // rad/s
};

struct SimConfig {
  double dt = 1e-3;
  /// Overrides the scenario duration when set.
  std::optional<double> duration;
  Integrator integrator = Integrator::kRk4;
  NoiseConfig noise;
  std::vector<DisturbanceWindow> disturbances;
  PendulumParams pendulum;
  ActuatorModel actuator;
  std::uint64_t seed = 42;

  double wz_disturbance_at(double t) const;
  void validate() const;
};

struct SensorReadings {
  double pitch = 0.0;
  double pitch_rate = 0.0;
  double yaw = 0.0;  // wrapped to (-pi, pi]
  double yaw_rate = 0.0;
  double draw_wire_d = 0.0;
  WheelRates encoder_rates;
  std::array<double, 4> motor_currents{};
};

/// IMU, draw-wire and encoder models with a seeded noise source.
class Sensors {
 public:
  explicit Sensors(std::uint64_t seed) : rng_(seed) {}

  SensorReadings sense(const PlatformPose& pose, const WheelRates& rates, const Geometry& geom,
                       const SimConfig& cfg, double t,
                       const std::array<double, 4>& currents = {});

 private:
  double noise(double std_dev);

  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

struct StepOutput {
  PlatformPose pose;
  BodyTwist twist;  // body twist produced by the rates at the start of the step
  bool clamped = false;
};

/// Advances the pose by one step with constant wheel rates. `accel_x` is the
/// body-x acceleration seen by the pendulum channel. Throws
/// Error(kSingularGeometry).
StepOutput step(const PlatformPose& pose, const WheelRates& rates, const Geometry& geom,
                const SimConfig& cfg, double dt, double t = 0.0, double accel_x = 0.0);

/// Wheel actuators of the four wheels, including the motor speed loops when
/// the model is in motor mode.
class Drivetrain {
 public:
  Drivetrain(const ActuatorModel& model, const PidGains& motor_gains);

  const WheelRates& update(const WheelRates& target, double dt);

  const WheelRates& actual() const { return actual_; }
  const std::array<double, 4>& currents() const { return currents_; }
  bool saturated() const;

 private:
  ActuatorModel model_;
  WheelRates actual_;
  std::array<double, 4> currents_{};
  std::vector<MotorSpeedLoop> loops_;
};

struct LogRow {
  double t = 0.0;
  PlatformPose pose;
  BodyTwist twist;
  WheelRates rates;
  bool clamp = false;
};

struct TelemetryRow {
  double t = 0.0;
  LoopTelemetry balance_position;
  LoopTelemetry balance_speed;
  LoopTelemetry steering_position;
  LoopTelemetry steering_speed;
  LoopTelemetry distance_position;
  LoopTelemetry distance_speed;
  std::array<double, 4> motor_currents{};
  bool saturated = false;
};

struct TrajectoryLog {
  std::string scenario;
  std::vector<LogRow> rows;
  std::vector<TelemetryRow> telemetry;  // closed loop only
  int clamp_events = 0;

  bool empty() const { return rows.empty(); }
  /// Pose linearly interpolated at time t (clamped to the logged span).
  PlatformPose pose_at(double t) const;

  static const char* csv_header();
  void write_csv(std::ostream& out) const;
  std::string to_csv() const;
  void write_telemetry_csv(std::ostream& out) const;
};

/// Feeds wheels_from_body(command) to the actuators each step, no feedback.
/// Segment boundaries are hit exactly: each segment is split into equal steps
/// no longer than cfg.dt.
TrajectoryLog run_open_loop(const Scenario& scenario, const Geometry& geom, const SimConfig& cfg);

/// Full control stack per tick: sense -> controllers -> command_mixer ->
/// actuators -> step. One log row per outer-loop tick. Errors are rethrown
/// with the tick index attached.
TrajectoryLog run_closed_loop(const Scenario& scenario, const ControlConfig& control,
                              const Geometry& geom, const SimConfig& cfg);

}  // namespace odd
