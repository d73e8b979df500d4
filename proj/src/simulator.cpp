#include "odd/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

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

void ActuatorModel::validate() const {
  if (!(time_constant >= 0.0 && rate_limit > 0.0 && accel_limit > 0.0 && torque_constant > 0.0 &&
        inertia > 0.0 && viscous_friction >= 0.0 && current_limit > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "actuator model parameters must be positive");
  }
}

WheelRates actuator_step(const WheelRates& target, const WheelRates& actual,
                         const ActuatorModel& model, double dt) {
  require_positive_dt(dt);
  WheelRates out;
  for (std::size_t i = 0; i < 4; ++i) {
    double next = target[i];
    if (model.mode == ActuatorMode::kLag && model.time_constant > 0.0) {
      next = (model.time_constant * actual[i] + dt * target[i]) / (model.time_constant + dt);
    }
    if (model.mode != ActuatorMode::kIdeal && std::isfinite(model.accel_limit)) {
      const double max_delta = model.accel_limit * dt;
      next = std::clamp(next, actual[i] - max_delta, actual[i] + max_delta);
    }
    out[i] = std::clamp(next, -model.rate_limit, model.rate_limit);
  }
  return out;
}

double SimConfig::wz_disturbance_at(double t) const {
  double bias = 0.0;
  for (const auto& w : disturbances) {
    if (t >= w.t_start && t < w.t_end) bias += w.wz_bias;
  }
  return bias;
}

void SimConfig::validate() const {
  require_positive_dt(dt);
  if (duration && !(*duration >= dt)) {
    throw Error(ErrorCode::kInvalidArgument, "sim duration must be >= dt");
  }
  if (pendulum.enabled && !(pendulum.com_height > 0.0 && pendulum.gravity > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "pendulum com_height and gravity must be > 0");
  }
  actuator.validate();
}

double Sensors::noise(double std_dev) { return std_dev > 0.0 ? std_dev * normal_(rng_) : 0.0; }

SensorReadings Sensors::sense(const PlatformPose& pose, const WheelRates& rates,
                              const Geometry& geom, const SimConfig& cfg, double t,
                              const std::array<double, 4>& currents) {
  SensorReadings s;
  const BodyTwist twist = body_from_wheels(rates, geom, std::clamp(pose.d, geom.d_min(), geom.d_max()));
  s.pitch = pose.pitch;
  s.pitch_rate = pose.pitch_rate;
  s.yaw = wrap_angle(pose.phi);
  s.yaw_rate = twist.wz + cfg.wz_disturbance_at(t);
  s.draw_wire_d = pose.d;
  s.encoder_rates = rates;
  s.motor_currents = currents;
  if (cfg.noise.enabled) {
    s.pitch += noise(cfg.noise.imu_angle_std);
    s.pitch_rate += noise(cfg.noise.imu_rate_std);
    s.yaw = wrap_angle(s.yaw + noise(cfg.noise.imu_angle_std));
    s.yaw_rate += noise(cfg.noise.imu_rate_std);
    s.draw_wire_d += noise(cfg.noise.draw_wire_rel_std * pose.d);
    for (std::size_t i = 0; i < 4; ++i) s.encoder_rates[i] += noise(cfg.noise.encoder_std);
  }
  return s;
}

namespace {

struct State {
  double x, y, phi, d, pitch, pitch_rate;

  State operator+(const State& o) const {
    return {x + o.x, y + o.y, phi + o.phi, d + o.d, pitch + o.pitch, pitch_rate + o.pitch_rate};
  }
  State operator*(double s) const {
    return {s * x, s * y, s * phi, s * d, s * pitch, s * pitch_rate};
  }
};

struct Derivative {
  const WheelRates& rates;
  const Geometry& geom;
  const SimConfig& cfg;
  double accel_x;

  State operator()(const State& s, double t) const {
    const double d = std::clamp(s.d, geom.d_min(), geom.d_max());
    const BodyTwist tw = body_from_wheels(rates, geom, d);
    const double c = std::cos(s.phi);
    const double sn = std::sin(s.phi);
    State out{c * tw.vx - sn * tw.vy,
              sn * tw.vx + c * tw.vy,
              tw.wz + cfg.wz_disturbance_at(t),
              tw.d_dot,
              0.0,
              0.0};
    if (cfg.pendulum.enabled) {
      const auto& p = cfg.pendulum;
      out.pitch = s.pitch_rate;
      out.pitch_rate = (p.gravity / p.com_height) * std::sin(s.pitch) -
                       (accel_x / p.com_height) * std::cos(s.pitch) - p.damping * s.pitch_rate;
    }
    return out;
  }
};

}  // namespace

StepOutput step(const PlatformPose& pose, const WheelRates& rates, const Geometry& geom,
                const SimConfig& cfg, double dt, double t, double accel_x) {
  require_positive_dt(dt);
  const State s0{pose.x, pose.y, pose.phi, pose.d, pose.pitch, pose.pitch_rate};
  const Derivative f{rates, geom, cfg, accel_x};

  StepOutput out;
  out.twist = body_from_wheels(rates, geom, std::clamp(pose.d, geom.d_min(), geom.d_max()));

  State s1;
  if (cfg.integrator == Integrator::kEuler) {
    s1 = s0 + f(s0, t) * dt;
  } else {
    const State k1 = f(s0, t);
    const State k2 = f(s0 + k1 * (0.5 * dt), t + 0.5 * dt);
    const State k3 = f(s0 + k2 * (0.5 * dt), t + 0.5 * dt);
    const State k4 = f(s0 + k3 * dt, t + dt);
    s1 = s0 + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
  }

  out.pose = {s1.x, s1.y, s1.phi, s1.d, s1.pitch, s1.pitch_rate};
  if (!cfg.pendulum.enabled) {
    out.pose.pitch = pose.pitch;
    out.pose.pitch_rate = pose.pitch_rate;
  }
  if (!geom.contains(out.pose.d)) {
    out.pose.d = std::clamp(out.pose.d, geom.d_min(), geom.d_max());
    out.clamped = true;
  }
  return out;
}

Drivetrain::Drivetrain(const ActuatorModel& model, const PidGains& motor_gains) : model_(model) {
  model_.validate();
  if (model_.mode == ActuatorMode::kMotor) {
    loops_.assign(4, MotorSpeedLoop(motor_gains, model_.current_limit));
  }
}

const WheelRates& Drivetrain::update(const WheelRates& target, double dt) {
  if (model_.mode != ActuatorMode::kMotor) {
    actual_ = actuator_step(target, actual_, model_, dt);
    return actual_;
  }
  require_positive_dt(dt);
  // Current loop ideal within the step; exact solution of the first-order
  // plant for constant current over dt.
  const double a = model_.viscous_friction / model_.inertia;
  const double decay = std::exp(-a * dt);
  for (std::size_t i = 0; i < 4; ++i) {
    const double target_rate = std::clamp(target[i], -model_.rate_limit, model_.rate_limit);
    currents_[i] = loops_[i].step(target_rate, actual_[i], dt);
    const double accel = model_.torque_constant * currents_[i] / model_.inertia;
    const double next = a > 0.0 ? actual_[i] * decay + accel / a * (1.0 - decay)
                                : actual_[i] + accel * dt;
    actual_[i] = std::clamp(next, -model_.rate_limit, model_.rate_limit);
  }
  return actual_;
}

bool Drivetrain::saturated() const {
  return std::any_of(loops_.begin(), loops_.end(),
                     [](const MotorSpeedLoop& l) { return l.saturated(); });
}

PlatformPose TrajectoryLog::pose_at(double t) const {
  if (rows.empty()) throw Error(ErrorCode::kEmptyLog, "trajectory log is empty");
  if (t <= rows.front().t) return rows.front().pose;
  if (t >= rows.back().t) return rows.back().pose;
  const auto it = std::lower_bound(rows.begin(), rows.end(), t,
                                   [](const LogRow& r, double v) { return r.t < v; });
  const LogRow& b = *it;
  const LogRow& a = *(it - 1);
  const double s = b.t > a.t ? (t - a.t) / (b.t - a.t) : 0.0;
  const auto lerp = [s](double u, double v) { return u + s * (v - u); };
  return {lerp(a.pose.x, b.pose.x),         lerp(a.pose.y, b.pose.y),
          lerp(a.pose.phi, b.pose.phi),     lerp(a.pose.d, b.pose.d),
          lerp(a.pose.pitch, b.pose.pitch), lerp(a.pose.pitch_rate, b.pose.pitch_rate)};
}

const char* TrajectoryLog::csv_header() {
  return "t,x_E,y_E,phi,d,pitch,vx_B,vy_B,wz_B,d_dot,theta1,theta2,theta3,theta4,clamp_flag";
}

void TrajectoryLog::write_csv(std::ostream& out) const {
  out << csv_header() << '\n';
  for (const auto& r : rows) {
    out << fmt::format("{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},"
                       "{:.9g},{:.9g},{:.9g},{:.9g},{}\n",
                       r.t, r.pose.x, r.pose.y, r.pose.phi, r.pose.d, r.pose.pitch, r.twist.vx,
                       r.twist.vy, r.twist.wz, r.twist.d_dot, r.rates[0], r.rates[1], r.rates[2],
                       r.rates[3], r.clamp ? 1 : 0);
  }
}

std::string TrajectoryLog::to_csv() const {
  std::ostringstream ss;
  write_csv(ss);
  return ss.str();
}

void TrajectoryLog::write_telemetry_csv(std::ostream& out) const {
  out << "t";
  for (const char* loop : {"balance_pos", "balance_speed", "steer_pos", "steer_speed", "dist_pos",
                           "dist_speed"}) {
    out << ',' << loop << "_setpoint," << loop << "_measurement," << loop << "_output";
  }
  out << ",current1,current2,current3,current4,saturated\n";
  for (const auto& r : telemetry) {
    out << fmt::format("{:.9g}", r.t);
    for (const LoopTelemetry* l : {&r.balance_position, &r.balance_speed, &r.steering_position,
                                   &r.steering_speed, &r.distance_position, &r.distance_speed}) {
      out << fmt::format(",{:.9g},{:.9g},{:.9g}", l->setpoint, l->measurement, l->output);
    }
    out << fmt::format(",{:.9g},{:.9g},{:.9g},{:.9g},{}\n", r.motor_currents[0],
                       r.motor_currents[1], r.motor_currents[2], r.motor_currents[3],
                       r.saturated ? 1 : 0);
  }
}

namespace {

void check_start(const Scenario& scenario, const Geometry& geom, const SimConfig& cfg) {
  scenario.validate();
  cfg.validate();
  geom.require_in_range(scenario.initial_pose.d);
}

[[noreturn]] void rethrow_at(const Error& e, long tick) {
  throw Error(e.code(), fmt::format("tick {}: {}", tick, e.message()));
}

}  // namespace

TrajectoryLog run_open_loop(const Scenario& scenario, const Geometry& geom, const SimConfig& cfg) {
  check_start(scenario, geom, cfg);
  TrajectoryLog log;
  log.scenario = scenario.name;

  Drivetrain drive(cfg.actuator, ControlConfig::defaults().motor_speed);
  PlatformPose pose = scenario.initial_pose;
  const double total = cfg.duration.value_or(scenario.duration());

  // Extend or truncate the segment list to the requested duration.
  std::vector<Segment> segments;
  double acc = 0.0;
  for (const auto& seg : scenario.segments) {
    if (acc >= total) break;
    Segment s = seg;
    s.duration = std::min(seg.duration, total - acc);
    segments.push_back(s);
    acc += s.duration;
  }
  if (acc < total) {
    Segment tail = scenario.segments.back();
    tail.twist = scenario.command_at(scenario.duration());
    tail.twist_end.reset();
    tail.duration = total - acc;
    segments.push_back(tail);
  }

  long tick = 0;
  double seg_start = 0.0;
  double prev_vx = 0.0;
  LogRow row;
  try {
    for (const auto& seg : segments) {
      const auto n = static_cast<long>(std::ceil(seg.duration / cfg.dt - 1e-9));
      const double h = seg.duration / static_cast<double>(n);
      for (long i = 0; i < n; ++i, ++tick) {
        const double t = seg_start + static_cast<double>(i) * h;
        const BodyTwist cmd = seg.at(static_cast<double>(i) * h);
        const WheelRates& actual = drive.update(wheels_from_body(cmd, geom, pose.d), h);
        const double vx = body_from_wheels(actual, geom, pose.d).vx;
        const double accel = tick == 0 ? 0.0 : (vx - prev_vx) / h;
        prev_vx = vx;
        const StepOutput next = step(pose, actual, geom, cfg, h, t, accel);
        row.t = t;
        row.pose = pose;
        row.twist = next.twist;
        row.rates = actual;
        log.rows.push_back(row);
        row.clamp = next.clamped;
        log.clamp_events += next.clamped ? 1 : 0;
        pose = next.pose;
      }
      seg_start += seg.duration;
    }
  } catch (const Error& e) {
    rethrow_at(e, tick);
  }
  row.t = seg_start;
  row.pose = pose;
  log.rows.push_back(row);
  return log;
}

namespace {

double slew(double current, double target, double max_delta) {
  return std::clamp(target, current - max_delta, current + max_delta);
}

}  // namespace

TrajectoryLog run_closed_loop(const Scenario& scenario, const ControlConfig& control,
                              const Geometry& geom, const SimConfig& cfg) {
  check_start(scenario, geom, cfg);
  TrajectoryLog log;
  log.scenario = scenario.name;

  const double dt = cfg.dt;
  const long outer_every = std::max(1L, std::lround(1.0 / (control.outer_rate_hz * dt)));
  const double outer_dt = static_cast<double>(outer_every) * dt;
  const double total = cfg.duration.value_or(scenario.duration());
  const long steps = std::max(1L, std::lround(total / dt));

  Drivetrain drive(cfg.actuator, control.motor_speed);
  Sensors sensors(cfg.seed);
  BalancingController balancing(control.balancing, geom.r());
  SteeringController steering(control.steering);
  DistanceController distance(control.distance, geom.d_min(), geom.d_max());

  const bool balance_on = control.balancing_enabled && cfg.pendulum.enabled;
  PlatformPose pose = scenario.initial_pose;
  SpeedCommand shaped;
  double yaw_setpoint = pose.phi;
  double d_setpoint = pose.d;
  double prev_draw_wire = pose.d;
  double prev_vx = 0.0;
  WheelRates targets;
  bool clamp_flag = false;

  long tick = 0;
  try {
    for (long k = 0; k < steps; ++k) {
      const double t = static_cast<double>(k) * dt;
      if (k % outer_every == 0) {
        tick = k / outer_every;
        const SensorReadings s = sensors.sense(pose, drive.actual(), geom, cfg, t, drive.currents());
        const BodyTwist cmd = scenario.command_at(t);
        const SpeedCommand raw = control.limits.clamp({cmd.vx, cmd.vy, cmd.wz, cmd.d_dot});
        const double max_dv = control.command_accel_limit * outer_dt;
        shaped = {slew(shaped.vx, raw.vx, max_dv), slew(shaped.vy, raw.vy, max_dv), raw.wz,
                  raw.d_dot};

        const double d_rate = k == 0 ? 0.0 : (s.draw_wire_d - prev_draw_wire) / outer_dt;
        prev_draw_wire = s.draw_wire_d;

        double u_balance = 0.0;
        if (balance_on) {
          balancing.set_velocity_reference(shaped.vx);
          u_balance = balancing.step(s.pitch, s.encoder_rates.average(), outer_dt, s.pitch_rate);
        }
        double u_steer = 0.0;
        if (control.steering_enabled) {
          steering.set_rate_reference(shaped.wz);
          u_steer = steering.step(s.yaw, s.yaw_rate, wrap_angle(yaw_setpoint), outer_dt);
        }
        double u_dist = 0.0;
        if (control.distance_enabled) {
          distance.set_rate_reference(shaped.d_dot);
          u_dist = distance.step(s.draw_wire_d, d_rate, d_setpoint, outer_dt);
        }
        const double d_mix = std::clamp(s.draw_wire_d, geom.d_min(), geom.d_max());
        targets = command_mixer(shaped, u_balance, u_steer, u_dist, geom, d_mix);

        LogRow row;
        row.t = t;
        row.pose = pose;
        row.twist = body_from_wheels(drive.actual(), geom, pose.d);
        row.rates = drive.actual();
        row.clamp = clamp_flag;
        clamp_flag = false;
        log.rows.push_back(row);

        TelemetryRow tel;
        tel.t = t;
        tel.balance_position = balancing.position_telemetry();
        tel.balance_speed = balancing.speed_telemetry();
        tel.steering_position = steering.position_telemetry();
        tel.steering_speed = steering.speed_telemetry();
        tel.distance_position = distance.position_telemetry();
        tel.distance_speed = distance.speed_telemetry();
        tel.motor_currents = drive.currents();
        tel.saturated = (balance_on && balancing.saturated()) ||
                        (control.steering_enabled && steering.saturated()) ||
                        (control.distance_enabled && distance.saturated()) || drive.saturated();
        log.telemetry.push_back(tel);

        yaw_setpoint += shaped.wz * outer_dt;
        d_setpoint = std::clamp(d_setpoint + shaped.d_dot * outer_dt, geom.d_min(), geom.d_max());
      }

      const WheelRates& actual = drive.update(targets, dt);
      const double vx = body_from_wheels(actual, geom, pose.d).vx;
      const double accel = k == 0 ? 0.0 : (vx - prev_vx) / dt;
      prev_vx = vx;
      const StepOutput next = step(pose, actual, geom, cfg, dt, t, accel);
      clamp_flag = clamp_flag || next.clamped;
      log.clamp_events += next.clamped ? 1 : 0;
      pose = next.pose;
    }
  } catch (const Error& e) {
    rethrow_at(e, tick);
  }
  LogRow last;
  last.t = static_cast<double>(steps) * dt;
  last.pose = pose;
  last.twist = body_from_wheels(drive.actual(), geom, pose.d);
  last.rates = drive.actual();
  last.clamp = clamp_flag;
  log.rows.push_back(last);
  return log;
}

}  // namespace odd
