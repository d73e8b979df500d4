#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "odd/errors.hpp"
#include "odd/mecanum_kinematics.hpp"

using namespace odd;

namespace {

const Geometry kGeom = Geometry::defaults();  // r=0.05, w=0.3, T=(1,-1,1,-1)

void expect_rates(const WheelRates& a, std::array<double, 4> b, double tol = 1e-12) {
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(a[i], b[i], tol) << "wheel " << i + 1;
}

// Wheel rate of each wheel from its contact-point velocity: (v_x + T v_y) / r.
WheelRates contact_point_oracle(const BodyTwist& t, const Geometry& g, double d) {
  // Collinear layout: every contact point sits on the body y axis, the left
  // group centred at +d/2 and the right at -d/2, wheels +/- w/2 around each.
  // Lateral group rate is +d_dot/2 on the left and -d_dot/2 on the right.
  const double w = g.w();
  const std::array<double, 4> py{0.5 * (d + w), 0.5 * (d - w), -0.5 * (d - w), -0.5 * (d + w)};
  const std::array<double, 4> spread{0.5, 0.5, -0.5, -0.5};
  WheelRates out;
  for (std::size_t i = 0; i < 4; ++i) {
    const double vx = t.vx - t.wz * py[i];
    const double vy = t.vy + spread[i] * t.d_dot;
    out[i] = (vx + g.tan_alpha()[i] * vy) / g.r();
  }
  return out;
}

}  // namespace

TEST(Geometry, DefaultsAndValidation) {
  EXPECT_DOUBLE_EQ(kGeom.r(), 0.05);
  EXPECT_DOUBLE_EQ(kGeom.w(), 0.3);
  EXPECT_NEAR(kGeom.tan_alpha()[1], -1.0, 1e-15);
  GeometryParams p;
  p.r = 0.0;
  EXPECT_THROW(Geometry{p}, Error);
  p = GeometryParams{};
  p.d_min = 0.9;
  EXPECT_THROW(Geometry{p}, Error);
  p = GeometryParams{};
  p.alpha = {std::numbers::pi / 4, std::numbers::pi / 4, std::numbers::pi / 4,
             std::numbers::pi / 4};
  try {
    Geometry g(p);
    FAIL() << "T=(1,1,1,1) must be singular";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularGeometry);
    EXPECT_NE(std::string(e.what()).find("sigma1"), std::string::npos);
  }
}

TEST(Geometry, SpacingRange) {
  EXPECT_TRUE(kGeom.contains(0.25));
  EXPECT_FALSE(kGeom.contains(0.9));
  try {
    (void)wheels_from_body({1, 0, 0, 0}, kGeom, 0.9);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSpacingOutOfRange);
  }
}

TEST(WheelMatrixL, Columns) {
  const Matrix4 m = wheel_matrix_L(kGeom, 0.4);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(m(i, 0), 20.0, 1e-12);
  const double t[4] = {1, -1, 1, -1};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(m(i, 1), t[i] / 0.05, 1e-12);
  const double c3[4] = {-3, 3, 5, 11};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(m(i, 2), c3[i], 1e-12);
  const double c4[4] = {0, 0, -20, 20};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(m(i, 3), c4[i], 1e-12);
}

TEST(WheelMatrixR, Columns) {
  const Matrix4 m = wheel_matrix_R(kGeom, 0.4);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(m(i, 0), 20.0, 1e-12);
  const double c3[4] = {-11, -5, -3, 3};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(m(i, 2), c3[i], 1e-12);
  EXPECT_DOUBLE_EQ(m(2, 3), 0.0);
  EXPECT_DOUBLE_EQ(m(3, 3), 0.0);
}

TEST(WheelsFromGroup, Examples) {
  expect_rates(wheels_from_group({1, 0, 0, 0, GroupPoint::kLeft}, kGeom, 0.4), {20, 20, 20, 20});
  expect_rates(wheels_from_group({0, 0, 0, 0, GroupPoint::kLeft}, kGeom, 0.4), {0, 0, 0, 0});
  expect_rates(wheels_from_group({0, 0.1, 0, 0.2, GroupPoint::kLeft}, kGeom, 0.4), {2, -2, -2, 2});
}

TEST(GroupFromWheels, Examples) {
  auto g = group_from_wheels(WheelRates{{20, 20, 20, 20}}, kGeom, 0.4);
  EXPECT_NEAR(g.vx_left, 1, 1e-12);
  EXPECT_NEAR(g.vy_left, 0, 1e-12);
  EXPECT_NEAR(g.vx_right, 1, 1e-12);
  EXPECT_NEAR(g.vy_right, 0, 1e-12);
  g = group_from_wheels(WheelRates{{0, 0, 0, 0}}, kGeom, 0.4);
  EXPECT_EQ(g, (GroupVelocities{0, 0, 0, 0}));
  g = group_from_wheels(WheelRates{{2, -2, -2, 2}}, kGeom, 0.4);
  EXPECT_NEAR(g.vx_left, 0, 1e-12);
  EXPECT_NEAR(g.vy_left, 0.1, 1e-12);
  EXPECT_NEAR(g.vx_right, 0, 1e-12);
  EXPECT_NEAR(g.vy_right, -0.1, 1e-12);
}

TEST(BodyFromWheels, Examples) {
  auto t = body_from_wheels(WheelRates{{20, 20, 20, 20}}, kGeom, 0.4);
  EXPECT_NEAR(t.vx, 1, 1e-12);
  EXPECT_NEAR(t.vy, 0, 1e-12);
  EXPECT_NEAR(t.wz, 0, 1e-12);
  EXPECT_NEAR(t.d_dot, 0, 1e-12);
  t = body_from_wheels(WheelRates{{0, 0, 0, 0}}, kGeom, 0.4);
  EXPECT_NEAR(t.vx, 0, 1e-15);
  t = body_from_wheels(WheelRates{{2, -2, -2, 2}}, kGeom, 0.4);
  EXPECT_NEAR(t.vx, 0, 1e-12);
  EXPECT_NEAR(t.vy, 0, 1e-12);
  EXPECT_NEAR(t.wz, 0, 1e-12);
  EXPECT_NEAR(t.d_dot, 0.2, 1e-12);
}

TEST(WheelsFromBody, Examples) {
  expect_rates(wheels_from_body({1, 0, 0, 0}, kGeom, 0.4), {20, 20, 20, 20});
  expect_rates(wheels_from_body({0, 0, 0, 0}, kGeom, 0.4), {0, 0, 0, 0});
  expect_rates(wheels_from_body({0, 0, 0, 0.2}, kGeom, 0.4), {2, -2, -2, 2});
}

TEST(WheelsFromBody, MatchesContactPointOracle) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1, 1);
  std::uniform_real_distribution<double> ud(0.25, 0.8);
  for (int i = 0; i < 1000; ++i) {
    const BodyTwist t{u(rng), u(rng), 2 * u(rng), 0.2 * u(rng)};
    const double d = ud(rng);
    const WheelRates a = wheels_from_body(t, kGeom, d);
    const WheelRates b = contact_point_oracle(t, kGeom, d);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(a[k], b[k], 1e-12);
  }
}

TEST(WheelsFromBody, LeftAndRightPathsAgree) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(-1, 1);
  std::uniform_real_distribution<double> ud(0.25, 0.8);
  for (int i = 0; i < 1000; ++i) {
    const BodyTwist t{u(rng), u(rng), u(rng), u(rng)};
    const double d = ud(rng);
    const WheelRates a = wheels_from_body(t, kGeom, d);
    const WheelRates b = wheels_from_body_via_right(t, kGeom, d);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(a[k], b[k], 1e-12);
  }
}

TEST(WheelsFromBody, Superposition) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 200; ++i) {
    const BodyTwist a{u(rng), u(rng), u(rng), u(rng)};
    const BodyTwist b{u(rng), u(rng), u(rng), u(rng)};
    const WheelRates sum = wheels_from_body(a + b, kGeom, 0.5);
    const WheelRates parts = wheels_from_body(a, kGeom, 0.5) + wheels_from_body(b, kGeom, 0.5);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(sum[k], parts[k], 1e-12);
  }
}

TEST(PrototypeRoundTrip, RandomGeometries) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(-1, 1);
  std::uniform_real_distribution<double> ua(0.4, 1.2);
  int geometries = 0;
  while (geometries < 20) {
    GeometryParams p;
    p.r = 0.03 + 0.05 * std::abs(u(rng));
    p.w = 0.1 + 0.3 * std::abs(u(rng));
    p.alpha = {ua(rng), -ua(rng), ua(rng), -ua(rng)};
    std::optional<Geometry> g;
    try {
      g.emplace(p);
    } catch (const Error&) {
      continue;
    }
    ++geometries;
    std::uniform_real_distribution<double> ud(g->d_min(), g->d_max());
    for (int i = 0; i < 50; ++i) {
      const BodyTwist t{u(rng), u(rng), u(rng), 0.2 * u(rng)};
      const double d = ud(rng);
      const BodyTwist back = body_from_wheels(wheels_from_body(t, *g, d), *g, d);
      EXPECT_NEAR(back.vx, t.vx, 1e-9);
      EXPECT_NEAR(back.vy, t.vy, 1e-9);
      EXPECT_NEAR(back.wz, t.wz, 1e-9);
      EXPECT_NEAR(back.d_dot, t.d_dot, 1e-9);
    }
  }
}

TEST(Sigma1, Examples) {
  const std::array<double, 4> alt{1, -1, 1, -1};
  EXPECT_NEAR(sigma1(alt, 0.5, 0.3), 2.0, 1e-15);
  EXPECT_NEAR(sigma1(alt, 0.5, 0.9), 2.0, 1e-15);
  EXPECT_EQ(sigma1({0, 0, 0, 0}, 0.5, 0.3), 0.0);
  EXPECT_NEAR(sigma1(alt, 0.0, 0.3), 0.0, 1e-15);
}

TEST(Sigma1, TermByTermOracle) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int i = 0; i < 200; ++i) {
    const std::array<double, 4> T{u(rng), u(rng), u(rng), u(rng)};
    const double d = std::abs(u(rng));
    const double w = std::abs(u(rng));
    const double terms[6] = {T[0] * T[2] * d,  -T[0] * T[3] * d, T[0] * T[3] * w,
                             -T[1] * T[2] * d, -T[1] * T[2] * w, T[1] * T[3] * d};
    double sum = 0.0;
    for (double x : terms) sum += x;
    EXPECT_NEAR(sigma1(T, d, w), sum, 1e-12);
  }
}

TEST(Sigma1, DeterminantLaw) {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> u(-2, 2);
  std::uniform_real_distribution<double> ud(0.25, 0.8);
  for (int i = 0; i < 200; ++i) {
    const std::array<double, 4> T{u(rng), u(rng), u(rng), u(rng)};
    const double d = ud(rng);
    const double w = 0.1 + std::abs(0.2 * u(rng));
    const double r = 0.05;
    const double det = detail::group_to_wheels_matrix(r, w, T, d).determinant();
    EXPECT_NEAR(det * d * std::pow(r, 4), sigma1(T, d, w), 1e-9);
  }
}

TEST(GroupFromWheels, SingularPatternThrows) {
  const std::array<double, 4> same{1, 1, 1, 1};
  try {
    (void)detail::wheels_to_group_matrix(0.05, 0.3, same, 0.4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularGeometry);
  }
}
