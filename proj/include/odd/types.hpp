#pragma once

#include <array>
#include <cstddef>

namespace odd {

/// Center-point velocity of the platform in body frame B, plus the spacing
/// rate between the two wheel groups.
struct BodyTwist {
  double vx = 0.0;     // m/s along B_x
  double vy = 0.0;     // m/s along B_y
  double wz = 0.0;     // rad/s about B_z
  double d_dot = 0.0;  // m/s, positive widens the track

  friend BodyTwist operator+(const BodyTwist& a, const BodyTwist& b) {
    return {a.vx + b.vx, a.vy + b.vy, a.wz + b.wz, a.d_dot + b.d_dot};
  }
  friend BodyTwist operator*(double s, const BodyTwist& t) {
    return {s * t.vx, s * t.vy, s * t.wz, s * t.d_dot};
  }
  friend bool operator==(const BodyTwist&, const BodyTwist&) = default;
};

/// Velocities of the left-group center L and right-group center R, body frame.
struct GroupVelocities {
  double vx_left = 0.0;
  double vy_left = 0.0;
  double vx_right = 0.0;
  double vy_right = 0.0;

  friend GroupVelocities operator+(const GroupVelocities& a, const GroupVelocities& b) {
    return {a.vx_left + b.vx_left, a.vy_left + b.vy_left, a.vx_right + b.vx_right,
            a.vy_right + b.vy_right};
  }
  friend GroupVelocities operator*(double s, const GroupVelocities& g) {
    return {s * g.vx_left, s * g.vy_left, s * g.vx_right, s * g.vy_right};
  }
  friend bool operator==(const GroupVelocities&, const GroupVelocities&) = default;
};

/// Angular rates of the four Mecanum wheels, numbered 1..4 from left to right
/// (stored at indices 0..3).
struct WheelRates {
  std::array<double, 4> theta_dot{};

  double& operator[](std::size_t i) { return theta_dot[i]; }
  double operator[](std::size_t i) const { return theta_dot[i]; }

  double average() const {
    return 0.25 * (theta_dot[0] + theta_dot[1] + theta_dot[2] + theta_dot[3]);
  }

  friend WheelRates operator+(const WheelRates& a, const WheelRates& b) {
    WheelRates out;
    for (std::size_t i = 0; i < 4; ++i) out[i] = a[i] + b[i];
    return out;
  }
  friend bool operator==(const WheelRates&, const WheelRates&) = default;
};

}  // namespace odd
