#include <gtest/gtest.h>

#include <numbers>

#include "odd/errors.hpp"
#include "odd/scenarios.hpp"
#include "odd/verification.hpp"

using namespace odd;

TEST(Verification, DefaultBatteryPasses) {
  const auto results = run_acceptance(VerifyOptions{});
  ASSERT_EQ(results.size(), 11u);
  for (const auto& r : results) EXPECT_TRUE(r.passed) << format_check(r, true);
}

TEST(Verification, ReportIsSeedStable) {
  VerifyOptions opt;
  opt.seed = 7;
  std::string a, b;
  for (const auto& r : run_acceptance(opt)) a += format_check(r) + "\n";
  for (const auto& r : run_acceptance(opt)) b += format_check(r) + "\n";
  EXPECT_EQ(a, b);
}

TEST(Verification, SingularGeometryIsReported) {
  VerifyOptions opt;
  opt.config.geometry.alpha = {std::numbers::pi / 4, std::numbers::pi / 4, std::numbers::pi / 4,
                               std::numbers::pi / 4};
  try {
    run_acceptance(opt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularGeometry);
  }
}

TEST(Verification, DivergenceHalvesWithStep) {
  const Geometry g = Geometry::defaults();
  const Scenario s = *find_builtin("circle_x");
  const double a = integrator_divergence(s, g, 2e-3);
  const double b = integrator_divergence(s, g, 1e-3);
  EXPECT_NEAR(a / b, 2.0, 0.01);
}

TEST(Verification, SaturationDwell) {
  TrajectoryLog log;
  for (int i = 0; i < 10; ++i) {
    TelemetryRow r;
    r.t = 0.1 * i;
    r.saturated = i >= 2 && i <= 6;
    log.telemetry.push_back(r);
  }
  EXPECT_NEAR(longest_saturation_dwell(log), 0.4, 1e-12);
}
