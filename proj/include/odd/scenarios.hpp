#pragma once

#include <optional>
#include <string>
#include <vector>

#include "odd/scenario.hpp"
#include "odd/simulator.hpp"

namespace odd {

/// Speeds and durations for the built-in experiments. These are artifact
/// defaults; no numbers were published for the original runs.
struct ScenarioDefaults {
  double v = 0.3;           // m/s
  double omega = 0.6;       // rad/s
  double segment_t = 2.0;   // s
  double d_rate = 0.05;     // m/s
  double ramp_t = 4.0;      // s per widening or narrowing leg
  double d0 = 0.4;          // m, motion scenarios
  double reconfig_d0 = 0.3; // m, reconfiguration scenarios
};

/// square, rhombus, circle_x, circle_y, reconfig_x, reconfig_y, reconfig_xz.
std::vector<Scenario> builtin_scenarios(const ScenarioDefaults& defaults = {});
std::optional<Scenario> find_builtin(const std::string& name,
                                     const ScenarioDefaults& defaults = {});
std::vector<std::string> builtin_names();

struct RefState {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double phi = 0.0;
  double d = 0.0;
};

/// Closed-form integral of a piecewise-constant twist schedule: straight
/// lines for pure translation, circular arcs when rotating, linear spacing
/// ramps.
class ReferenceTrajectory {
 public:
  /// Throws Error(kUnsupportedSegment) for ramped segments.
  explicit ReferenceTrajectory(const Scenario& scenario, double sample_dt = 0.005);

  RefState at(double t) const;
  /// Start point followed by the end point of every segment.
  const std::vector<RefState>& vertices() const { return vertices_; }
  const std::vector<RefState>& polyline() const { return polyline_; }
  double duration() const { return duration_; }
  /// Radius |v|/|w| if the whole schedule is one constant rotating twist.
  std::optional<double> arc_radius() const { return arc_radius_; }

 private:
  std::vector<Segment> segments_;
  std::vector<RefState> vertices_;
  std::vector<RefState> polyline_;
  double duration_ = 0.0;
  std::optional<double> arc_radius_;
};

ReferenceTrajectory analytic_reference(const Scenario& scenario, double sample_dt = 0.005);

struct CircleFit {
  double cx = 0.0;
  double cy = 0.0;
  double radius = 0.0;
};

/// Algebraic (Kasa) least-squares circle through the points.
CircleFit fit_circle(const std::vector<std::pair<double, double>>& points);

/// Distance from (x, y) to the nearest point of the polyline.
double polyline_distance(double x, double y, const std::vector<RefState>& polyline);

struct TrajectoryMetrics {
  double closure_error = 0.0;         // |p(T) - p(0)|, m
  double rms_deviation = 0.0;         // nearest-point RMS to the reference, m
  double max_deviation = 0.0;         // m
  std::optional<double> estimated_radius;  // circle fit, single-arc references only
  double heading_drift = 0.0;         // phi(T) - phi_ref(T), rad
  double d_tracking_rmse = 0.0;       // m
  double path_length = 0.0;           // reference path length, m
};

/// Throws Error(kEmptyLog).
TrajectoryMetrics compute_metrics(const TrajectoryLog& log, const ReferenceTrajectory& ref);

struct MetricThreshold {
  std::string metric;
  double limit = 0.0;  // pass iff value <= limit
};

struct ScenarioResult {
  std::string scenario;
  TrajectoryMetrics metrics;
  std::vector<MetricThreshold> thresholds;
  std::optional<double> reference_radius;
};

/// Acceptance thresholds used for open-loop ideal runs of a scenario.
std::vector<MetricThreshold> default_thresholds(const ReferenceTrajectory& ref);

/// Value of a named metric: closure_error, rms_deviation, max_deviation,
/// relative_radius_error, abs_heading_drift, d_tracking_rmse. Throws
/// Error(kInvalidArgument) for unknown names or a missing radius.
double metric_value(const ScenarioResult& result, const std::string& metric);

struct ReportEntry {
  std::string scenario;
  std::string metric;
  double limit = 0.0;
  double value = 0.0;
  bool passed = false;
};

struct ExperimentReport {
  std::vector<ReportEntry> entries;
  bool passed = true;

  std::string to_text() const;
  std::string to_csv() const;
};

/// Throws Error(kNoResults) for an empty result set.
ExperimentReport experiment_report(const std::vector<ScenarioResult>& results);

/// Metrics as a two-line CSV (header + values).
std::string metrics_csv(const std::string& scenario, const TrajectoryMetrics& m);
/// Reference polyline as CSV: t,x_E,y_E,phi,d.
std::string reference_csv(const ReferenceTrajectory& ref);

}  // namespace odd
