#pragma once

#include <optional>
#include <string>
#include <vector>

#include "odd/types.hpp"

namespace odd {

/// World-frame pose of the platform center plus spacing and the optional toy
/// pitch channel.
struct PlatformPose {
  double x = 0.0;      // m, E frame
  double y = 0.0;      // m, E frame
  double phi = 0.0;    // rad, unwrapped
  double d = 0.4;      // m
  double pitch = 0.0;  // rad
  double pitch_rate = 0.0;

  friend bool operator==(const PlatformPose&, const PlatformPose&) = default;
};

enum class LoopMode { kOpen, kClosed };

/// A command segment. `twist_end`, when present, makes the command ramp
/// linearly from `twist` to `twist_end` over the segment.
struct Segment {
  double duration = 0.0;  // s
  BodyTwist twist;
  std::optional<BodyTwist> twist_end;

  BodyTwist at(double local_t) const;
  friend bool operator==(const Segment&, const Segment&) = default;
};

struct Scenario {
  std::string name;
  std::vector<Segment> segments;
  PlatformPose initial_pose;
  LoopMode mode = LoopMode::kOpen;

  double duration() const;
  /// Commanded twist at time t (clamped to the last segment past the end).
  BodyTwist command_at(double t) const;
  /// Throws Error(kInvalidArgument) if segments are empty or a duration is
  /// not positive.
  void validate() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

std::string serialize_scenario(const Scenario& s);
/// Throws Error(kParseError) with the offending line number.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario_file(const std::string& path);

}  // namespace odd
