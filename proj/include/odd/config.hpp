#pragma once

#include <string>

#include "odd/control_stack.hpp"
#include "odd/mecanum_kinematics.hpp"
#include "odd/simulator.hpp"

namespace odd {

/// Contents of the shared config file: sections `geometry`, `gains`, `sim`.
/// Every key is optional; missing keys keep their defaults.
struct AppConfig {
  GeometryParams geometry;
  ControlConfig control = ControlConfig::defaults();
  SimConfig sim;
};

/// Throws Error(kParseError) with a line number for malformed or unknown keys.
AppConfig parse_config(const std::string& text);
AppConfig load_config_file(const std::string& path);
/// YAML text with every key and its value; parse_config(serialize_config(c))
/// reproduces c.
std::string serialize_config(const AppConfig& config);

}  // namespace odd
