#include "odd/drive_models.hpp"

#include <cmath>
#include <string>

#include "odd/errors.hpp"

namespace odd {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonPositiveSpacing: return "NonPositiveSpacing";
    case ErrorCode::kSpacingOutOfRange: return "SpacingOutOfRange";
    case ErrorCode::kSingularGeometry: return "SingularGeometry";
    case ErrorCode::kInvalidGeometry: return "InvalidGeometry";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNonPositiveDt: return "NonPositiveDt";
    case ErrorCode::kSetpointOutOfRange: return "SetpointOutOfRange";
    case ErrorCode::kUnsupportedSegment: return "UnsupportedSegment";
    case ErrorCode::kEmptyLog: return "EmptyLog";
    case ErrorCode::kNoResults: return "NoResults";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

Spacing::Spacing(double d, double min_spacing) : d_(d) {
  if (!std::isfinite(d) || d <= 0.0 || d < min_spacing) {
    throw Error(ErrorCode::kNonPositiveSpacing,
                "spacing d = " + std::to_string(d) + " m must exceed " +
                    std::to_string(min_spacing) + " m");
  }
}

DdTwist dd_forward(double vx_left, double vx_right, Spacing d) {
  return {0.5 * (vx_left + vx_right), (vx_right - vx_left) / d.value()};
}

DdWheelSpeeds dd_inverse(const DdTwist& t, Spacing d) {
  const double half = 0.5 * d.value();
  return {t.vx - half * t.wz, t.vx + half * t.wz};
}

OdForwardResult od_forward(const GroupVelocities& g, Spacing d) {
  OdForwardResult out;
  out.twist.vx = 0.5 * (g.vx_left + g.vx_right);
  out.twist.vy = 0.5 * (g.vy_left + g.vy_right);
  out.twist.wz = (g.vx_right - g.vx_left) / d.value();
  out.consistency_residual = std::abs(g.vx_left - g.vx_right);
  return out;
}

GroupVelocities od_inverse(const OdTwist& t, Spacing d) {
  const double half = 0.5 * d.value();
  return {t.vx - half * t.wz, t.vy, t.vx + half * t.wz, t.vy};
}

BodyTwist odd_forward(const GroupVelocities& g, Spacing d) {
  return {0.5 * (g.vx_left + g.vx_right), 0.5 * (g.vy_left + g.vy_right),
          (g.vx_right - g.vx_left) / d.value(), g.vy_left - g.vy_right};
}

GroupVelocities odd_inverse(const BodyTwist& t, Spacing d) {
  const double half = 0.5 * d.value();
  return {t.vx - half * t.wz, t.vy + 0.5 * t.d_dot, t.vx + half * t.wz, t.vy - 0.5 * t.d_dot};
}

}  // namespace odd
