#include "odd/mecanum_kinematics.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "odd/errors.hpp"

namespace odd {

namespace {

// Below this reciprocal condition estimate the LU solution is not trusted even
// if sigma1 passed its test.
constexpr double kMinReciprocalCondition = 1e-12;

void check_singularity(const std::array<double, 4>& T, double d, double w) {
  const double s1 = sigma1(T, d, w);
  if (!(std::abs(s1) >= singularity_tolerance(d, w))) {
    throw Error(ErrorCode::kSingularGeometry,
                fmt::format("sigma1 = {:.9g} at d = {:.9g} m, w = {:.9g} m", s1, d, w));
  }
}

}  // namespace

double sigma1(const std::array<double, 4>& T, double d, double w) {
  return T[0] * T[2] * d - T[0] * T[3] * d + T[0] * T[3] * w - T[1] * T[2] * d -
         T[1] * T[2] * w + T[1] * T[3] * d;
}

double sigma1(const Geometry& geom, double d) { return sigma1(geom.tan_alpha(), d, geom.w()); }

double singularity_tolerance(double d, double w) { return 1e-9 * (1.0 + d + w); }

Geometry::Geometry(const GeometryParams& params) : params_(params) {
  const auto& p = params_;
  if (!(p.r > 0.0) || !std::isfinite(p.r)) {
    throw Error(ErrorCode::kInvalidGeometry, fmt::format("wheel radius r = {} must be > 0", p.r));
  }
  if (!(p.w > 0.0) || !std::isfinite(p.w)) {
    throw Error(ErrorCode::kInvalidGeometry,
                fmt::format("within-group spacing w = {} must be > 0", p.w));
  }
  if (!(p.d_min > 0.0 && p.d_min < p.d_max) || !std::isfinite(p.d_max)) {
    throw Error(ErrorCode::kInvalidGeometry,
                fmt::format("spacing bounds must satisfy 0 < d_min < d_max (got {}, {})",
                            p.d_min, p.d_max));
  }
  for (std::size_t i = 0; i < 4; ++i) {
    const double a = p.alpha[i];
    if (!std::isfinite(a) || std::abs(a) >= 0.5 * std::numbers::pi) {
      throw Error(ErrorCode::kInvalidGeometry,
                  fmt::format("roller angle alpha_{} = {} rad must satisfy |alpha| < pi/2", i + 1,
                              a));
    }
    tan_alpha_[i] = std::tan(a);
  }
  // sigma1 is affine in d, so a sign change or near-zero inside the range
  // shows up at one of the endpoints.
  const double lo = sigma1(tan_alpha_, p.d_min, p.w);
  const double hi = sigma1(tan_alpha_, p.d_max, p.w);
  check_singularity(tan_alpha_, p.d_min, p.w);
  check_singularity(tan_alpha_, p.d_max, p.w);
  if ((lo > 0.0) != (hi > 0.0)) {
    throw Error(ErrorCode::kSingularGeometry,
                fmt::format("sigma1 changes sign inside [{}, {}] m ({:.9g} -> {:.9g})", p.d_min,
                            p.d_max, lo, hi));
  }
}

void Geometry::require_in_range(double d) const {
  if (!contains(d)) {
    throw Error(ErrorCode::kSpacingOutOfRange,
                fmt::format("d = {:.9g} m outside [{:.9g}, {:.9g}] m", d, params_.d_min,
                            params_.d_max));
  }
}

namespace detail {

Matrix4 wheel_matrix_L(double r, double w, const std::array<double, 4>& T, double d) {
  Matrix4 m;
  // clang-format off
  m << 1.0, T[0], -0.5 * w,      0.0,
       1.0, T[1],  0.5 * w,      0.0,
       1.0, T[2],  d - 0.5 * w, -T[2],
       1.0, T[3],  d + 0.5 * w, -T[3];
  // clang-format on
  return m / r;
}

Matrix4 wheel_matrix_R(double r, double w, const std::array<double, 4>& T, double d) {
  Matrix4 m;
  // clang-format off
  m << 1.0, T[0], -(d + 0.5 * w), T[0],
       1.0, T[1], -(d - 0.5 * w), T[1],
       1.0, T[2], -0.5 * w,       0.0,
       1.0, T[3],  0.5 * w,       0.0;
  // clang-format on
  return m / r;
}

Matrix4 group_to_wheels_matrix(double r, double w, const std::array<double, 4>& T, double d) {
  // (vx_L, vy_L, vx_R, vy_R) -> (vx_L, vy_L, wz, d_dot)
  Matrix4 to_left;
  // clang-format off
  to_left <<  1.0,     0.0, 0.0,     0.0,
              0.0,     1.0, 0.0,     0.0,
             -1.0 / d, 0.0, 1.0 / d, 0.0,
              0.0,     1.0, 0.0,    -1.0;
  // clang-format on
  return wheel_matrix_L(r, w, T, d) * to_left;
}

Matrix4 body_to_wheels_matrix(double r, double w, const std::array<double, 4>& T, double d) {
  // (vx_B, vy_B, wz, d_dot) -> (vx_L, vy_L, wz, d_dot)
  Matrix4 to_left;
  // clang-format off
  to_left << 1.0, 0.0, -0.5 * d, 0.0,
             0.0, 1.0,  0.0,     0.5,
             0.0, 0.0,  1.0,     0.0,
             0.0, 0.0,  0.0,     1.0;
  // clang-format on
  return wheel_matrix_L(r, w, T, d) * to_left;
}

Matrix4 wheels_to_group_matrix(double r, double w, const std::array<double, 4>& T, double d) {
  check_singularity(T, d, w);
  const Matrix4 forward = group_to_wheels_matrix(r, w, T, d);
  const Eigen::PartialPivLU<Matrix4> lu(forward);
  const double rcond = lu.rcond();
  if (!(rcond >= kMinReciprocalCondition)) {
    throw Error(ErrorCode::kSingularGeometry,
                fmt::format("wheel-to-group map ill-conditioned (rcond = {:.3g}, sigma1 = {:.9g})",
                            rcond, sigma1(T, d, w)));
  }
  return lu.inverse();
}

}  // namespace detail

Matrix4 wheel_matrix_L(const Geometry& geom, double d) {
  geom.require_in_range(d);
  return detail::wheel_matrix_L(geom.r(), geom.w(), geom.tan_alpha(), d);
}

Matrix4 wheel_matrix_R(const Geometry& geom, double d) {
  geom.require_in_range(d);
  return detail::wheel_matrix_R(geom.r(), geom.w(), geom.tan_alpha(), d);
}

namespace {

WheelRates to_rates(const Vector4& v) { return WheelRates{{v[0], v[1], v[2], v[3]}}; }

Vector4 to_vector(const WheelRates& w) { return {w[0], w[1], w[2], w[3]}; }

}  // namespace

WheelRates wheels_from_group(const GroupFrameState& state, const Geometry& geom, double d) {
  const Matrix4 m =
      state.point == GroupPoint::kLeft ? wheel_matrix_L(geom, d) : wheel_matrix_R(geom, d);
  return to_rates(m * Vector4(state.vx, state.vy, state.wz, state.d_dot));
}

GroupVelocities group_from_wheels(const WheelRates& rates, const Geometry& geom, double d) {
  geom.require_in_range(d);
  const Vector4 g =
      detail::wheels_to_group_matrix(geom.r(), geom.w(), geom.tan_alpha(), d) * to_vector(rates);
  return {g[0], g[1], g[2], g[3]};
}

BodyTwist body_from_wheels(const WheelRates& rates, const Geometry& geom, double d) {
  return odd_forward(group_from_wheels(rates, geom, d), Spacing(d));
}

WheelRates wheels_from_body(const BodyTwist& t, const Geometry& geom, double d) {
  const GroupFrameState left{t.vx - 0.5 * d * t.wz, t.vy + 0.5 * t.d_dot, t.wz, t.d_dot,
                             GroupPoint::kLeft};
  return wheels_from_group(left, geom, d);
}

WheelRates wheels_from_body_via_right(const BodyTwist& t, const Geometry& geom, double d) {
  const GroupFrameState right{t.vx + 0.5 * d * t.wz, t.vy - 0.5 * t.d_dot, t.wz, t.d_dot,
                              GroupPoint::kRight};
  return wheels_from_group(right, geom, d);
}

}  // namespace odd
