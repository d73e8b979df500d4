#pragma once

#include <array>

#include <Eigen/Dense>

#include "odd/drive_models.hpp"
#include "odd/types.hpp"

namespace odd {

using Matrix4 = Eigen::Matrix4d;
using Vector4 = Eigen::Vector4d;

/// Unvalidated geometry description, as read from a config file.
struct GeometryParams {
  double r = 0.05;      // wheel radius, m
  double w = 0.30;      // within-group wheel spacing, m
  double d_min = 0.25;  // m
  double d_max = 0.80;  // m
  /// Roller angles of wheels 1..4, rad. Default pattern +45, -45, +45, -45 deg.
  std::array<double, 4> alpha{0.7853981633974483, -0.7853981633974483, 0.7853981633974483,
                              -0.7853981633974483};
};

/// Validated prototype geometry: positive dimensions, finite roller tangents
/// and a wheel-to-body map that stays invertible over the whole spacing range.
class Geometry {
 public:
  /// Throws Error(kInvalidGeometry) or Error(kSingularGeometry).
  explicit Geometry(const GeometryParams& params);

  static Geometry defaults() { return Geometry(GeometryParams{}); }

  const GeometryParams& params() const { return params_; }
  double r() const { return params_.r; }
  double w() const { return params_.w; }
  double d_min() const { return params_.d_min; }
  double d_max() const { return params_.d_max; }
  const std::array<double, 4>& alpha() const { return params_.alpha; }
  /// T_i = tan(alpha_i).
  const std::array<double, 4>& tan_alpha() const { return tan_alpha_; }

  bool contains(double d) const { return d >= params_.d_min && d <= params_.d_max; }
  /// Throws Error(kSpacingOutOfRange) when d leaves [d_min, d_max].
  void require_in_range(double d) const;

 private:
  GeometryParams params_;
  std::array<double, 4> tan_alpha_{};
};

enum class GroupPoint { kLeft, kRight };

/// Velocity state referenced to point L or point R.
struct GroupFrameState {
  double vx = 0.0;
  double vy = 0.0;
  double wz = 0.0;
  double d_dot = 0.0;
  GroupPoint point = GroupPoint::kLeft;
};

/// sigma1 = T1T3d - T1T4d + T1T4w - T2T3d - T2T3w + T2T4d. The wheel-to-body
/// map is singular exactly where this vanishes.
double sigma1(const std::array<double, 4>& tan_alpha, double d, double w);
double sigma1(const Geometry& geom, double d);

/// |sigma1| below this is treated as singular.
double singularity_tolerance(double d, double w);

Matrix4 wheel_matrix_L(const Geometry& geom, double d);
Matrix4 wheel_matrix_R(const Geometry& geom, double d);

WheelRates wheels_from_group(const GroupFrameState& state, const Geometry& geom, double d);
GroupVelocities group_from_wheels(const WheelRates& rates, const Geometry& geom, double d);
BodyTwist body_from_wheels(const WheelRates& rates, const Geometry& geom, double d);
WheelRates wheels_from_body(const BodyTwist& t, const Geometry& geom, double d);
/// Same result as wheels_from_body, computed through point R and the
/// right-group wheel matrix instead of point L.
WheelRates wheels_from_body_via_right(const BodyTwist& t, const Geometry& geom, double d);

/// Raw matrix builders with no validation, used for singularity analysis on
/// arbitrary (possibly degenerate) roller patterns.
namespace detail {
Matrix4 wheel_matrix_L(double r, double w, const std::array<double, 4>& tan_alpha, double d);
Matrix4 wheel_matrix_R(double r, double w, const std::array<double, 4>& tan_alpha, double d);
/// Maps (vx_L, vy_L, vx_R, vy_R) to wheel rates: wheel_matrix_L composed with
/// the rigid-transfer from group velocities to the L-frame state.
Matrix4 group_to_wheels_matrix(double r, double w, const std::array<double, 4>& tan_alpha,
                               double d);
/// Maps (vx_B, vy_B, wz_B, d_dot) to wheel rates.
Matrix4 body_to_wheels_matrix(double r, double w, const std::array<double, 4>& tan_alpha,
                              double d);
/// Numeric inverse of group_to_wheels_matrix (LU, partial pivoting). Throws
/// Error(kSingularGeometry) when sigma1 is below tolerance or the reciprocal
/// condition estimate collapses.
Matrix4 wheels_to_group_matrix(double r, double w, const std::array<double, 4>& tan_alpha,
                               double d);
}  // namespace detail

}  // namespace odd
