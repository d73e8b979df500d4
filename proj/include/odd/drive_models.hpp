#pragma once

#include "odd/types.hpp"

namespace odd {

/// Distance between the left-group center L and the right-group center R.
/// Construction rejects values at or below `min_spacing`.
class Spacing {
 public:
  static constexpr double kDefaultMinimum = 1e-6;  // m

  explicit Spacing(double d, double min_spacing = kDefaultMinimum);

  double value() const { return d_; }

 private:
  double d_;
};

struct DdTwist {
  double vx = 0.0;  // m/s
  double wz = 0.0;  // rad/s
  friend bool operator==(const DdTwist&, const DdTwist&) = default;
};

struct DdWheelSpeeds {
  double vx_left = 0.0;
  double vx_right = 0.0;
  friend bool operator==(const DdWheelSpeeds&, const DdWheelSpeeds&) = default;
};

/// Planar twist (no spacing rate) reconstructed from an omnidirectional drive.
struct OdTwist {
  double vx = 0.0;
  double vy = 0.0;
  double wz = 0.0;
  friend bool operator==(const OdTwist&, const OdTwist&) = default;
};

struct OdForwardResult {
  OdTwist twist;
  /// |vx_L - vx_R|. Nonzero means the command violates the fixed-spacing
  /// constraint and would be realized as slip.
  double consistency_residual = 0.0;
};

// Differential drive: two 1-DOF wheels at fixed spacing.
DdTwist dd_forward(double vx_left, double vx_right, Spacing d);
DdWheelSpeeds dd_inverse(const DdTwist& t, Spacing d);

// Omnidirectional drive: two 2-DOF groups at fixed spacing (over-actuated).
OdForwardResult od_forward(const GroupVelocities& g, Spacing d);
GroupVelocities od_inverse(const OdTwist& t, Spacing d);

// Omni differential drive: the lateral differential of the groups drives d.
BodyTwist odd_forward(const GroupVelocities& g, Spacing d);
GroupVelocities odd_inverse(const BodyTwist& t, Spacing d);

}  // namespace odd
