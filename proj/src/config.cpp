#include "odd/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "odd/errors.hpp"

namespace odd {

namespace {

constexpr double kDegPerRad = 180.0 / std::numbers::pi;

[[noreturn]] void fail(const YAML::Node& node, const std::string& what) {
  const auto mark = node.Mark();
  throw Error(ErrorCode::kParseError,
              fmt::format("line {}: {}", mark.is_null() ? 0 : mark.line + 1, what));
}

void allow_keys(const YAML::Node& map, std::initializer_list<const char*> keys,
                const char* section) {
  if (!map.IsMap()) fail(map, fmt::format("section '{}' must be a mapping", section));
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known) fail(kv.first, fmt::format("unknown key '{}' in '{}'", key, section));
  }
}

void read(const YAML::Node& map, const char* key, double& out) {
  if (const YAML::Node n = map[key]) {
    try {
      out = n.as<double>();
    } catch (const YAML::Exception&) {
      fail(n, fmt::format("'{}' must be a number", key));
    }
  }
}

void read(const YAML::Node& map, const char* key, bool& out) {
  if (const YAML::Node n = map[key]) {
    try {
      out = n.as<bool>();
    } catch (const YAML::Exception&) {
      fail(n, fmt::format("'{}' must be true or false", key));
    }
  }
}

void read_pid(const YAML::Node& map, const char* key, PidGains& g) {
  const YAML::Node n = map[key];
  if (!n) return;
  allow_keys(n, {"kp", "ki", "kd", "output_min", "output_max", "integral_limit",
                 "derivative_filter_tau"},
             key);
  read(n, "kp", g.kp);
  read(n, "ki", g.ki);
  read(n, "kd", g.kd);
  read(n, "output_min", g.output_min);
  read(n, "output_max", g.output_max);
  read(n, "integral_limit", g.integral_limit);
  read(n, "derivative_filter_tau", g.derivative_filter_tau);
  try {
    g.validate();
  } catch (const Error& e) {
    fail(n, e.message());
  }
}

void read_cascade(const YAML::Node& map, const char* key, CascadeGains& g, bool& enabled) {
  const YAML::Node n = map[key];
  if (!n) return;
  allow_keys(n, {"enabled", "position", "speed"}, key);
  read(n, "enabled", enabled);
  read_pid(n, "position", g.position);
  read_pid(n, "speed", g.speed);
}

void parse_geometry(const YAML::Node& n, GeometryParams& g) {
  allow_keys(n, {"r", "w", "d_min", "d_max", "alpha_deg"}, "geometry");
  read(n, "r", g.r);
  read(n, "w", g.w);
  read(n, "d_min", g.d_min);
  read(n, "d_max", g.d_max);
  if (const YAML::Node a = n["alpha_deg"]) {
    if (!a.IsSequence() || a.size() != 4) fail(a, "'alpha_deg' must be a list of 4 angles");
    for (std::size_t i = 0; i < 4; ++i) {
      try {
        g.alpha[i] = a[i].as<double>() / kDegPerRad;
      } catch (const YAML::Exception&) {
        fail(a[i], "'alpha_deg' entries must be numbers");
      }
    }
  }
}

void parse_gains(const YAML::Node& n, ControlConfig& c) {
  allow_keys(n, {"outer_rate_hz", "motor_rate_hz", "current_limit", "command_accel_limit",
                 "balancing", "steering", "distance", "motor_speed", "limits"},
             "gains");
  read(n, "outer_rate_hz", c.outer_rate_hz);
  read(n, "motor_rate_hz", c.motor_rate_hz);
  read(n, "current_limit", c.current_limit);
  read(n, "command_accel_limit", c.command_accel_limit);
  read_cascade(n, "balancing", c.balancing, c.balancing_enabled);
  read_cascade(n, "steering", c.steering, c.steering_enabled);
  read_cascade(n, "distance", c.distance, c.distance_enabled);
  read_pid(n, "motor_speed", c.motor_speed);
  if (const YAML::Node l = n["limits"]) {
    allow_keys(l, {"vx", "vy", "wz", "d_dot"}, "limits");
    read(l, "vx", c.limits.vx);
    read(l, "vy", c.limits.vy);
    read(l, "wz", c.limits.wz);
    read(l, "d_dot", c.limits.d_dot);
  }
  if (!(c.outer_rate_hz > 0.0 && c.motor_rate_hz > 0.0)) fail(n, "loop rates must be > 0");
}

void parse_sim(const YAML::Node& n, SimConfig& s) {
  allow_keys(n, {"dt", "duration", "integrator", "seed", "actuator", "pendulum", "noise",
                 "disturbances"},
             "sim");
  read(n, "dt", s.dt);
  if (const YAML::Node d = n["duration"]; d && !d.IsNull()) {
    double v = 0.0;
    read(n, "duration", v);
    s.duration = v;
  }
  if (const YAML::Node i = n["integrator"]) {
    const auto name = i.as<std::string>();
    if (name == "rk4") {
      s.integrator = Integrator::kRk4;
    } else if (name == "euler") {
      s.integrator = Integrator::kEuler;
    } else {
      fail(i, "integrator must be 'rk4' or 'euler'");
    }
  }
  if (const YAML::Node seed = n["seed"]) {
    try {
      s.seed = seed.as<std::uint64_t>();
    } catch (const YAML::Exception&) {
      fail(seed, "'seed' must be a non-negative integer");
    }
  }
  if (const YAML::Node a = n["actuator"]) {
    allow_keys(a, {"mode", "time_constant", "rate_limit", "accel_limit", "torque_constant",
                   "inertia", "viscous_friction", "current_limit"},
               "actuator");
    if (const YAML::Node m = a["mode"]) {
      const auto mode = m.as<std::string>();
      if (mode == "ideal") {
        s.actuator.mode = ActuatorMode::kIdeal;
      } else if (mode == "lag") {
        s.actuator.mode = ActuatorMode::kLag;
      } else if (mode == "motor") {
        s.actuator.mode = ActuatorMode::kMotor;
      } else {
        fail(m, "actuator mode must be 'ideal', 'lag' or 'motor'");
      }
    }
    read(a, "time_constant", s.actuator.time_constant);
    read(a, "rate_limit", s.actuator.rate_limit);
    read(a, "accel_limit", s.actuator.accel_limit);
    read(a, "torque_constant", s.actuator.torque_constant);
    read(a, "inertia", s.actuator.inertia);
    read(a, "viscous_friction", s.actuator.viscous_friction);
    read(a, "current_limit", s.actuator.current_limit);
  }
  if (const YAML::Node p = n["pendulum"]) {
    allow_keys(p, {"enabled", "com_height", "gravity", "damping"}, "pendulum");
    read(p, "enabled", s.pendulum.enabled);
    read(p, "com_height", s.pendulum.com_height);
    read(p, "gravity", s.pendulum.gravity);
    read(p, "damping", s.pendulum.damping);
  }
  if (const YAML::Node z = n["noise"]) {
    allow_keys(z, {"enabled", "draw_wire_rel_std", "imu_angle_std", "imu_rate_std",
                   "encoder_std"},
               "noise");
    read(z, "enabled", s.noise.enabled);
    read(z, "draw_wire_rel_std", s.noise.draw_wire_rel_std);
    read(z, "imu_angle_std", s.noise.imu_angle_std);
    read(z, "imu_rate_std", s.noise.imu_rate_std);
    read(z, "encoder_std", s.noise.encoder_std);
  }
  if (const YAML::Node list = n["disturbances"]) {
    if (!list.IsSequence()) fail(list, "'disturbances' must be a list");
    for (const auto& item : list) {
      allow_keys(item, {"t_start", "t_end", "wz_bias"}, "disturbances");
      DisturbanceWindow w;
      read(item, "t_start", w.t_start);
      read(item, "t_end", w.t_end);
      read(item, "wz_bias", w.wz_bias);
      s.disturbances.push_back(w);
    }
  }
  try {
    s.validate();
  } catch (const Error& e) {
    fail(n, e.message());
  }
}

void emit_pid(YAML::Emitter& out, const char* key, const PidGains& g) {
  out << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginMap;
  out << YAML::Key << "kp" << YAML::Value << g.kp;
  out << YAML::Key << "ki" << YAML::Value << g.ki;
  out << YAML::Key << "kd" << YAML::Value << g.kd;
  out << YAML::Key << "output_min" << YAML::Value << g.output_min;
  out << YAML::Key << "output_max" << YAML::Value << g.output_max;
  out << YAML::Key << "integral_limit" << YAML::Value << g.integral_limit;
  out << YAML::Key << "derivative_filter_tau" << YAML::Value << g.derivative_filter_tau;
  out << YAML::EndMap;
}

void emit_cascade(YAML::Emitter& out, const char* key, const CascadeGains& g, bool enabled) {
  out << YAML::Key << key << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "enabled" << YAML::Value << enabled;
  emit_pid(out, "position", g.position);
  emit_pid(out, "speed", g.speed);
  out << YAML::EndMap;
}

const char* mode_name(ActuatorMode m) {
  switch (m) {
    case ActuatorMode::kIdeal: return "ideal";
    case ActuatorMode::kLag: return "lag";
    case ActuatorMode::kMotor: return "motor";
  }
  return "ideal";
}

}  // namespace

AppConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::kParseError, fmt::format("line {}: {}", e.mark.line + 1, e.msg));
  }
  AppConfig c;
  if (root.IsNull()) return c;
  allow_keys(root, {"geometry", "gains", "sim"}, "config");
  try {
    if (const YAML::Node g = root["geometry"]) parse_geometry(g, c.geometry);
    if (const YAML::Node g = root["gains"]) parse_gains(g, c.control);
    if (const YAML::Node s = root["sim"]) parse_sim(s, c.sim);
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::kParseError, fmt::format("line {}: {}", e.mark.line + 1, e.msg));
  }
  return c;
}

AppConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.message());
  }
}

std::string serialize_config(const AppConfig& c) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;

  out << YAML::Key << "geometry" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "r" << YAML::Value << c.geometry.r;
  out << YAML::Key << "w" << YAML::Value << c.geometry.w;
  out << YAML::Key << "d_min" << YAML::Value << c.geometry.d_min;
  out << YAML::Key << "d_max" << YAML::Value << c.geometry.d_max;
  out << YAML::Key << "alpha_deg" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (double a : c.geometry.alpha) out << a * kDegPerRad;
  out << YAML::EndSeq << YAML::EndMap;

  const auto& k = c.control;
  out << YAML::Key << "gains" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "outer_rate_hz" << YAML::Value << k.outer_rate_hz;
  out << YAML::Key << "motor_rate_hz" << YAML::Value << k.motor_rate_hz;
  out << YAML::Key << "current_limit" << YAML::Value << k.current_limit;
  out << YAML::Key << "command_accel_limit" << YAML::Value << k.command_accel_limit;
  emit_cascade(out, "balancing", k.balancing, k.balancing_enabled);
  emit_cascade(out, "steering", k.steering, k.steering_enabled);
  emit_cascade(out, "distance", k.distance, k.distance_enabled);
  emit_pid(out, "motor_speed", k.motor_speed);
  out << YAML::Key << "limits" << YAML::Value << YAML::Flow << YAML::BeginMap;
  out << YAML::Key << "vx" << YAML::Value << k.limits.vx;
  out << YAML::Key << "vy" << YAML::Value << k.limits.vy;
  out << YAML::Key << "wz" << YAML::Value << k.limits.wz;
  out << YAML::Key << "d_dot" << YAML::Value << k.limits.d_dot;
  out << YAML::EndMap << YAML::EndMap;

  const auto& s = c.sim;
  out << YAML::Key << "sim" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "dt" << YAML::Value << s.dt;
  out << YAML::Key << "duration" << YAML::Value;
  if (s.duration) {
    out << *s.duration;
  } else {
    out << YAML::Null;
  }
  out << YAML::Key << "integrator" << YAML::Value
      << (s.integrator == Integrator::kRk4 ? "rk4" : "euler");
  out << YAML::Key << "seed" << YAML::Value << s.seed;
  out << YAML::Key << "actuator" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "mode" << YAML::Value << mode_name(s.actuator.mode);
  out << YAML::Key << "time_constant" << YAML::Value << s.actuator.time_constant;
  out << YAML::Key << "rate_limit" << YAML::Value << s.actuator.rate_limit;
  out << YAML::Key << "accel_limit" << YAML::Value << s.actuator.accel_limit;
  out << YAML::Key << "torque_constant" << YAML::Value << s.actuator.torque_constant;
  out << YAML::Key << "inertia" << YAML::Value << s.actuator.inertia;
  out << YAML::Key << "viscous_friction" << YAML::Value << s.actuator.viscous_friction;
  out << YAML::Key << "current_limit" << YAML::Value << s.actuator.current_limit;
  out << YAML::EndMap;
  out << YAML::Key << "pendulum" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "enabled" << YAML::Value << s.pendulum.enabled;
  out << YAML::Key << "com_height" << YAML::Value << s.pendulum.com_height;
  out << YAML::Key << "gravity" << YAML::Value << s.pendulum.gravity;
  out << YAML::Key << "damping" << YAML::Value << s.pendulum.damping;
  out << YAML::EndMap;
  out << YAML::Key << "noise" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "enabled" << YAML::Value << s.noise.enabled;
  out << YAML::Key << "draw_wire_rel_std" << YAML::Value << s.noise.draw_wire_rel_std;
  out << YAML::Key << "imu_angle_std" << YAML::Value << s.noise.imu_angle_std;
  out << YAML::Key << "imu_rate_std" << YAML::Value << s.noise.imu_rate_std;
  out << YAML::Key << "encoder_std" << YAML::Value << s.noise.encoder_std;
  out << YAML::EndMap;
  out << YAML::Key << "disturbances" << YAML::Value << YAML::BeginSeq;
  for (const auto& w : s.disturbances) {
    out << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "t_start" << YAML::Value << w.t_start;
    out << YAML::Key << "t_end" << YAML::Value << w.t_end;
    out << YAML::Key << "wz_bias" << YAML::Value << w.wz_bias;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace odd
