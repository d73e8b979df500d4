#include "odd/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "odd/errors.hpp"

namespace odd {

BodyTwist Segment::at(double local_t) const {
  if (!twist_end) return twist;
  const double s = duration > 0.0 ? std::clamp(local_t / duration, 0.0, 1.0) : 0.0;
  return (1.0 - s) * twist + s * *twist_end;
}

double Scenario::duration() const {
  double total = 0.0;
  for (const auto& seg : segments) total += seg.duration;
  return total;
}

BodyTwist Scenario::command_at(double t) const {
  double start = 0.0;
  for (const auto& seg : segments) {
    if (t < start + seg.duration) return seg.at(t - start);
    start += seg.duration;
  }
  return segments.empty() ? BodyTwist{} : segments.back().at(segments.back().duration);
}

void Scenario::validate() const {
  if (segments.empty()) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("scenario '{}' has no segments", name));
  }
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (!(segments[i].duration > 0.0) || !std::isfinite(segments[i].duration)) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("scenario '{}' segment {} duration must be > 0", name, i));
    }
  }
}

namespace {

void emit_twist(YAML::Emitter& out, const BodyTwist& t) {
  out << YAML::Key << "vx" << YAML::Value << t.vx;
  out << YAML::Key << "vy" << YAML::Value << t.vy;
  out << YAML::Key << "wz" << YAML::Value << t.wz;
  out << YAML::Key << "d_dot" << YAML::Value << t.d_dot;
}

[[noreturn]] void fail(const YAML::Node& node, const std::string& what) {
  const auto mark = node.Mark();
  throw Error(ErrorCode::kParseError,
              fmt::format("line {}: {}", mark.is_null() ? 0 : mark.line + 1, what));
}

double number(const YAML::Node& parent, const char* key, double fallback) {
  const YAML::Node n = parent[key];
  if (!n) return fallback;
  try {
    return n.as<double>();
  } catch (const YAML::Exception&) {
    fail(n, fmt::format("'{}' must be a number", key));
  }
}

BodyTwist parse_twist(const YAML::Node& n) {
  return {number(n, "vx", 0.0), number(n, "vy", 0.0), number(n, "wz", 0.0),
          number(n, "d_dot", 0.0)};
}

}  // namespace

std::string serialize_scenario(const Scenario& s) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << s.name;
  out << YAML::Key << "mode" << YAML::Value << (s.mode == LoopMode::kOpen ? "open" : "closed");
  out << YAML::Key << "initial_pose" << YAML::Value << YAML::Flow << YAML::BeginMap;
  out << YAML::Key << "x" << YAML::Value << s.initial_pose.x;
  out << YAML::Key << "y" << YAML::Value << s.initial_pose.y;
  out << YAML::Key << "phi" << YAML::Value << s.initial_pose.phi;
  out << YAML::Key << "d" << YAML::Value << s.initial_pose.d;
  out << YAML::Key << "pitch" << YAML::Value << s.initial_pose.pitch;
  out << YAML::Key << "pitch_rate" << YAML::Value << s.initial_pose.pitch_rate;
  out << YAML::EndMap;
  out << YAML::Key << "segments" << YAML::Value << YAML::BeginSeq;
  for (const auto& seg : s.segments) {
    out << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "duration" << YAML::Value << seg.duration;
    emit_twist(out, seg.twist);
    if (seg.twist_end) {
      out << YAML::Key << "end" << YAML::Value << YAML::Flow << YAML::BeginMap;
      emit_twist(out, *seg.twist_end);
      out << YAML::EndMap;
    }
    out << YAML::EndMap;
  }
  out << YAML::EndSeq << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

Scenario parse_scenario(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::kParseError, fmt::format("line {}: {}", e.mark.line + 1, e.msg));
  }
  if (!root.IsMap()) fail(root, "scenario must be a mapping");

  Scenario s;
  try {
    s.name = root["name"] ? root["name"].as<std::string>() : "unnamed";
  } catch (const YAML::Exception&) {
    fail(root["name"], "'name' must be a string");
  }
  if (const YAML::Node mode = root["mode"]) {
    const auto m = mode.as<std::string>();
    if (m == "open") {
      s.mode = LoopMode::kOpen;
    } else if (m == "closed") {
      s.mode = LoopMode::kClosed;
    } else {
      fail(mode, fmt::format("mode must be 'open' or 'closed', got '{}'", m));
    }
  }
  if (const YAML::Node p = root["initial_pose"]) {
    if (!p.IsMap()) fail(p, "'initial_pose' must be a mapping");
    s.initial_pose.x = number(p, "x", 0.0);
    s.initial_pose.y = number(p, "y", 0.0);
    s.initial_pose.phi = number(p, "phi", 0.0);
    s.initial_pose.d = number(p, "d", s.initial_pose.d);
    s.initial_pose.pitch = number(p, "pitch", 0.0);
    s.initial_pose.pitch_rate = number(p, "pitch_rate", 0.0);
  }
  const YAML::Node segs = root["segments"];
  if (!segs || !segs.IsSequence() || segs.size() == 0) {
    fail(segs ? segs : root, "'segments' must be a non-empty list");
  }
  for (const auto& n : segs) {
    if (!n.IsMap()) fail(n, "segment must be a mapping");
    Segment seg;
    if (!n["duration"]) fail(n, "segment is missing 'duration'");
    seg.duration = number(n, "duration", 0.0);
    if (!(seg.duration > 0.0)) fail(n["duration"], "segment duration must be > 0");
    seg.twist = parse_twist(n);
    if (const YAML::Node end = n["end"]) {
      if (!end.IsMap()) fail(end, "'end' must be a mapping");
      seg.twist_end = parse_twist(end);
    }
    s.segments.push_back(seg);
  }
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open scenario file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_scenario(ss.str());
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.message());
  }
}

}  // namespace odd
