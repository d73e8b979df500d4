#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "odd/errors.hpp"
#include "odd/scenarios.hpp"

using namespace odd;

namespace {

constexpr double kPi = std::numbers::pi;

TrajectoryLog log_from(const ReferenceTrajectory& ref, double dx = 0.0, double dy = 0.0) {
  TrajectoryLog log;
  for (const auto& s : ref.polyline()) {
    LogRow r;
    r.t = s.t;
    r.pose.x = s.x + dx;
    r.pose.y = s.y + dy;
    r.pose.phi = s.phi;
    r.pose.d = s.d;
    log.rows.push_back(r);
  }
  return log;
}

}  // namespace

TEST(Builtins, Catalogue) {
  const auto names = builtin_names();
  const std::vector<std::string> expected{"square",     "rhombus",    "circle_x",   "circle_y",
                                          "reconfig_x", "reconfig_y", "reconfig_xz"};
  EXPECT_EQ(names, expected);
  EXPECT_FALSE(find_builtin("nope").has_value());
}

TEST(Builtins, SquareProtocol) {
  const Scenario s = *find_builtin("square");
  ASSERT_EQ(s.segments.size(), 4u);
  const double sx[4] = {1, 0, -1, 0};
  const double sy[4] = {0, 1, 0, -1};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(s.segments[i].twist.vx, 0.3 * sx[i]);
    EXPECT_DOUBLE_EQ(s.segments[i].twist.vy, 0.3 * sy[i]);
    EXPECT_DOUBLE_EQ(s.segments[i].duration, 2.0);
  }
  const auto ref = analytic_reference(s);
  ASSERT_EQ(ref.vertices().size(), 5u);
  EXPECT_NEAR(ref.vertices()[1].x, 0.6, 1e-12);
  EXPECT_NEAR(ref.vertices()[2].y, 0.6, 1e-12);
  EXPECT_NEAR(ref.vertices()[4].x, 0.0, 1e-12);
}

TEST(Builtins, CircleRadius) {
  for (const char* name : {"circle_x", "circle_y"}) {
    const auto ref = analytic_reference(*find_builtin(name));
    ASSERT_TRUE(ref.arc_radius().has_value());
    EXPECT_NEAR(*ref.arc_radius(), 0.5, 1e-12);
    EXPECT_NEAR(ref.duration(), 2 * kPi / 0.6, 1e-12);
  }
  // Lateral twist: starts moving along +y_E, centre on the -x side.
  const auto ref = analytic_reference(*find_builtin("circle_y"));
  const RefState q = ref.at(ref.duration() / 4);
  EXPECT_NEAR(q.x, -0.5, 1e-9);
  EXPECT_NEAR(q.y, 0.5, 1e-9);
}

TEST(Builtins, ReconfigRamp) {
  const Scenario s = *find_builtin("reconfig_x");
  EXPECT_DOUBLE_EQ(s.initial_pose.d, 0.3);
  const auto ref = analytic_reference(s);
  EXPECT_NEAR(ref.at(4.0).d, 0.5, 1e-12);
  EXPECT_NEAR(ref.at(8.0).d, 0.3, 1e-12);
  EXPECT_NEAR(ref.at(8.0).x, 2.4, 1e-12);
  EXPECT_NEAR(ref.at(8.0).y, 0.0, 1e-15);
}

TEST(Scenario, CommandLookup) {
  const Scenario s = *find_builtin("square");
  EXPECT_DOUBLE_EQ(s.command_at(1.0).vx, 0.3);
  EXPECT_DOUBLE_EQ(s.command_at(3.0).vy, 0.3);
  EXPECT_DOUBLE_EQ(s.duration(), 8.0);
}

TEST(Scenario, RampedSegment) {
  Segment seg{2.0, BodyTwist{0, 0, 0, 0}, BodyTwist{1, 0, 0, 0}};
  EXPECT_DOUBLE_EQ(seg.at(1.0).vx, 0.5);
  Scenario s;
  s.segments = {seg};
  try {
    (void)analytic_reference(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnsupportedSegment);
  }
}

TEST(ScenarioYaml, RoundTrip) {
  for (const auto& s : builtin_scenarios()) {
    const Scenario back = parse_scenario(serialize_scenario(s));
    EXPECT_EQ(back, s) << s.name;
  }
  Scenario r;
  r.name = "ramp";
  r.mode = LoopMode::kClosed;
  r.initial_pose = {0.1, 0.2, 0.3, 0.45, 0.01, 0.0};
  r.segments = {Segment{1.5, {0.1, 0.2, 0.3, 0.01}, BodyTwist{0.2, 0, 0, 0}}};
  EXPECT_EQ(parse_scenario(serialize_scenario(r)), r);
}

TEST(ScenarioYaml, ErrorsCarryLineNumbers) {
  const std::string text =
      "name: bad\n"
      "segments:\n"
      "  - {duration: 1.0, vx: 0.1}\n"
      "  - {duration: -2, vx: 0.1}\n";
  try {
    parse_scenario(text);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_scenario("name: x\nsegments: []\n"), Error);
  EXPECT_THROW(parse_scenario("name: x\nsegments:\n  - {duration: 1, vx: abc}\n"), Error);
  EXPECT_THROW(parse_scenario("name: [unclosed\n"), Error);
}

TEST(Metrics, IdenticalLogScoresZero) {
  const auto ref = analytic_reference(*find_builtin("square"));
  const TrajectoryMetrics m = compute_metrics(log_from(ref), ref);
  EXPECT_NEAR(m.rms_deviation, 0.0, 1e-15);
  EXPECT_NEAR(m.max_deviation, 0.0, 1e-15);
  EXPECT_NEAR(m.closure_error, 0.0, 1e-12);
  EXPECT_NEAR(m.d_tracking_rmse, 0.0, 1e-15);
  EXPECT_NEAR(m.heading_drift, 0.0, 1e-15);
  EXPECT_NEAR(m.path_length, 2.4, 1e-12);
}

TEST(Metrics, LateralOffset) {
  Scenario s;
  s.name = "line";
  s.segments = {Segment{2.0, {0.3, 0, 0, 0}, std::nullopt}};
  const auto ref = analytic_reference(s);
  const TrajectoryMetrics m = compute_metrics(log_from(ref, 0.0, 0.01), ref);
  EXPECT_NEAR(m.rms_deviation, 0.01, 1e-12);
  EXPECT_NEAR(m.max_deviation, 0.01, 1e-12);
}

TEST(Metrics, EmptyLog) {
  const auto ref = analytic_reference(*find_builtin("square"));
  try {
    compute_metrics(TrajectoryLog{}, ref);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyLog);
  }
}

TEST(CircleFit, ExactSamples) {
  std::vector<std::pair<double, double>> pts;
  for (int i = 0; i < 100; ++i) {
    const double a = 2 * kPi * i / 100;
    pts.emplace_back(3.0 + 0.5 * std::cos(a), -1.0 + 0.5 * std::sin(a));
  }
  const CircleFit f = fit_circle(pts);
  EXPECT_NEAR(f.radius, 0.5, 1e-9);
  EXPECT_NEAR(f.cx, 3.0, 1e-9);
  EXPECT_NEAR(f.cy, -1.0, 1e-9);
  // A quarter arc alone still pins the radius.
  pts.resize(25);
  EXPECT_NEAR(fit_circle(pts).radius, 0.5, 1e-9);
}

TEST(CircleFit, SampledReference) {
  const auto ref = analytic_reference(*find_builtin("circle_x"));
  const TrajectoryMetrics m = compute_metrics(log_from(ref), ref);
  ASSERT_TRUE(m.estimated_radius.has_value());
  EXPECT_NEAR(*m.estimated_radius, 0.5, 1e-9);
}

TEST(PolylineDistance, Segments) {
  std::vector<RefState> poly{{0, 0, 0, 0, 0.4}, {1, 1, 0, 0, 0.4}, {2, 1, 1, 0, 0.4}};
  EXPECT_NEAR(polyline_distance(0.5, 0.2, poly), 0.2, 1e-15);
  EXPECT_NEAR(polyline_distance(1.0, 0.5, poly), 0.0, 1e-15);
  EXPECT_NEAR(polyline_distance(-1.0, 0.0, poly), 1.0, 1e-15);
}

TEST(Report, PassAndFail) {
  const auto ref = analytic_reference(*find_builtin("square"));
  ScenarioResult good{"square", compute_metrics(log_from(ref), ref), default_thresholds(ref),
                      std::nullopt};
  ExperimentReport rep = experiment_report({good});
  EXPECT_TRUE(rep.passed);
  ScenarioResult bad{"square", compute_metrics(log_from(ref, 0.0, 0.01), ref),
                     default_thresholds(ref), std::nullopt};
  rep = experiment_report({good, bad});
  EXPECT_FALSE(rep.passed);
  const std::string text = rep.to_text();
  EXPECT_NE(text.find("FAIL"), std::string::npos);
  EXPECT_NE(text.find("rms_deviation"), std::string::npos);
  EXPECT_NE(text.find("limit=0.0001"), std::string::npos);
  // Only the two horizontal edges move off the square, hence rms 0.01/sqrt(2).
  EXPECT_NEAR(rep.entries[3].value, 0.01 / std::sqrt(2.0), 1e-3);
  EXPECT_FALSE(rep.entries[3].passed);
  EXPECT_NE(rep.to_csv().find("square,rms_deviation,0.00704934867,0.0001,0"), std::string::npos)
      << rep.to_csv();
}

TEST(Report, NoResults) {
  try {
    experiment_report({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoResults);
  }
}

TEST(Report, MetricNames) {
  const auto ref = analytic_reference(*find_builtin("circle_x"));
  ScenarioResult r{"circle_x", compute_metrics(log_from(ref), ref), default_thresholds(ref), 0.5};
  EXPECT_NEAR(metric_value(r, "relative_radius_error"), 0.0, 1e-9);
  EXPECT_THROW(metric_value(r, "bogus"), Error);
}

TEST(MetricsCsv, Format) {
  TrajectoryMetrics m;
  m.estimated_radius = 0.5;
  const std::string csv = metrics_csv("circle_x", m);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "scenario,closure_error,rms_deviation,max_deviation,estimated_radius,heading_drift,"
            "d_tracking_rmse,path_length");
  EXPECT_NE(csv.find("circle_x,0,0,0,0.5,"), std::string::npos);
  m.estimated_radius.reset();
  EXPECT_NE(metrics_csv("sq", m).find(",nan,"), std::string::npos);
}
