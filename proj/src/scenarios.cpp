#include "odd/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "odd/errors.hpp"

namespace odd {

namespace {

Segment seg(double t, double vx, double vy, double wz, double d_dot) {
  return Segment{t, BodyTwist{vx, vy, wz, d_dot}, std::nullopt};
}

Scenario make(std::string name, double d0, std::vector<Segment> segments) {
  Scenario s;
  s.name = std::move(name);
  s.initial_pose.d = d0;
  s.segments = std::move(segments);
  return s;
}

}  // namespace

std::vector<Scenario> builtin_scenarios(const ScenarioDefaults& k) {
  const double v = k.v;
  const double w = k.omega;
  const double t = k.segment_t;
  const double dr = k.d_rate;
  const double circle_t = 2.0 * std::numbers::pi / w;
  return {
      make("square", k.d0, {seg(t, v, 0, 0, 0), seg(t, 0, v, 0, 0), seg(t, -v, 0, 0, 0),
                            seg(t, 0, -v, 0, 0)}),
      make("rhombus", k.d0, {seg(t, v, 0.5 * v, 0, 0), seg(t, -v, 0.5 * v, 0, 0),
                             seg(t, -v, -0.5 * v, 0, 0), seg(t, v, -0.5 * v, 0, 0)}),
      make("circle_x", k.d0, {seg(circle_t, v, 0, w, 0)}),
      make("circle_y", k.d0, {seg(circle_t, 0, v, w, 0)}),
      make("reconfig_x", k.reconfig_d0, {seg(k.ramp_t, v, 0, 0, dr), seg(k.ramp_t, v, 0, 0, -dr)}),
      make("reconfig_y", k.reconfig_d0, {seg(k.ramp_t, 0, v, 0, dr), seg(k.ramp_t, 0, v, 0, -dr)}),
      make("reconfig_xz", k.reconfig_d0,
           {seg(0.5 * k.ramp_t, v, 0, 0, dr), seg(0.5 * k.ramp_t, v, 0, w, dr),
            seg(0.5 * k.ramp_t, v, 0, w, -dr), seg(0.5 * k.ramp_t, v, 0, 0, -dr)}),
  };
}

std::vector<std::string> builtin_names() {
  std::vector<std::string> names;
  for (const auto& s : builtin_scenarios()) names.push_back(s.name);
  return names;
}

std::optional<Scenario> find_builtin(const std::string& name, const ScenarioDefaults& defaults) {
  for (auto& s : builtin_scenarios(defaults)) {
    if (s.name == name) return s;
  }
  return std::nullopt;
}

namespace {

RefState advance(const RefState& s, const BodyTwist& tw, double dt) {
  RefState out = s;
  out.t = s.t + dt;
  out.d = s.d + tw.d_dot * dt;
  if (std::abs(tw.wz) < 1e-12) {
    const double c = std::cos(s.phi);
    const double sn = std::sin(s.phi);
    out.x = s.x + (tw.vx * c - tw.vy * sn) * dt;
    out.y = s.y + (tw.vx * sn + tw.vy * c) * dt;
    return out;
  }
  const double p0 = s.phi;
  const double p1 = s.phi + tw.wz * dt;
  out.phi = p1;
  out.x = s.x + (tw.vx * (std::sin(p1) - std::sin(p0)) + tw.vy * (std::cos(p1) - std::cos(p0))) /
                    tw.wz;
  out.y = s.y + (tw.vx * (std::cos(p0) - std::cos(p1)) + tw.vy * (std::sin(p1) - std::sin(p0))) /
                    tw.wz;
  return out;
}

}  // namespace

ReferenceTrajectory::ReferenceTrajectory(const Scenario& scenario, double sample_dt) {
  scenario.validate();
  if (!(sample_dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "sample_dt must be > 0");
  for (std::size_t i = 0; i < scenario.segments.size(); ++i) {
    const auto& s = scenario.segments[i];
    if (s.twist_end && !(*s.twist_end == s.twist)) {
      throw Error(ErrorCode::kUnsupportedSegment,
                  fmt::format("scenario '{}' segment {} varies its twist; the analytic reference "
                              "needs piecewise-constant commands",
                              scenario.name, i));
    }
    segments_.push_back(s);
  }
  const auto& p = scenario.initial_pose;
  RefState state{0.0, p.x, p.y, p.phi, p.d};
  vertices_.push_back(state);
  polyline_.push_back(state);
  for (const auto& s : segments_) {
    const auto n = std::max(1L, static_cast<long>(std::ceil(s.duration / sample_dt - 1e-9)));
    const double h = s.duration / static_cast<double>(n);
    const RefState start = state;
    for (long i = 1; i <= n; ++i) {
      // Integrate from the segment start each time so samples carry no
      // accumulated rounding.
      RefState sample = advance(start, s.twist, h * static_cast<double>(i));
      polyline_.push_back(sample);
    }
    state = advance(start, s.twist, s.duration);
    polyline_.back() = state;
    vertices_.push_back(state);
  }
  duration_ = state.t;

  const BodyTwist& first = segments_.front().twist;
  const bool single = std::all_of(segments_.begin(), segments_.end(),
                                  [&](const Segment& s) { return s.twist == first; });
  if (single && std::abs(first.wz) > 1e-12) {
    arc_radius_ = std::hypot(first.vx, first.vy) / std::abs(first.wz);
  }
}

RefState ReferenceTrajectory::at(double t) const {
  t = std::clamp(t, 0.0, duration_);
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const double end = vertices_[i + 1].t;
    if (t <= end || i + 1 == segments_.size()) {
      return advance(vertices_[i], segments_[i].twist, t - vertices_[i].t);
    }
  }
  return vertices_.back();
}

ReferenceTrajectory analytic_reference(const Scenario& scenario, double sample_dt) {
  return ReferenceTrajectory(scenario, sample_dt);
}

CircleFit fit_circle(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw Error(ErrorCode::kInvalidArgument, "circle fit needs >= 3 points");
  // Center the data first; the normal equations are badly scaled otherwise.
  double mx = 0.0;
  double my = 0.0;
  for (const auto& [x, y] : points) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(points.size());
  my /= static_cast<double>(points.size());
  Eigen::MatrixXd a(points.size(), 3);
  Eigen::VectorXd b(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double x = points[i].first - mx;
    const double y = points[i].second - my;
    a(static_cast<Eigen::Index>(i), 0) = 2.0 * x;
    a(static_cast<Eigen::Index>(i), 1) = 2.0 * y;
    a(static_cast<Eigen::Index>(i), 2) = 1.0;
    b(static_cast<Eigen::Index>(i)) = x * x + y * y;
  }
  const Eigen::Vector3d sol = a.colPivHouseholderQr().solve(b);
  CircleFit fit;
  fit.cx = sol(0) + mx;
  fit.cy = sol(1) + my;
  fit.radius = std::sqrt(sol(2) + sol(0) * sol(0) + sol(1) * sol(1));
  return fit;
}

double polyline_distance(double x, double y, const std::vector<RefState>& poly) {
  if (poly.empty()) throw Error(ErrorCode::kInvalidArgument, "empty reference polyline");
  double best = std::hypot(x - poly.front().x, y - poly.front().y);
  for (std::size_t i = 1; i < poly.size(); ++i) {
    const double ax = poly[i - 1].x;
    const double ay = poly[i - 1].y;
    const double dx = poly[i].x - ax;
    const double dy = poly[i].y - ay;
    const double len2 = dx * dx + dy * dy;
    double s = len2 > 0.0 ? ((x - ax) * dx + (y - ay) * dy) / len2 : 0.0;
    s = std::clamp(s, 0.0, 1.0);
    best = std::min(best, std::hypot(x - (ax + s * dx), y - (ay + s * dy)));
  }
  return best;
}

TrajectoryMetrics compute_metrics(const TrajectoryLog& log, const ReferenceTrajectory& ref) {
  if (log.rows.empty()) throw Error(ErrorCode::kEmptyLog, "cannot score an empty trajectory log");
  TrajectoryMetrics m;
  const auto& first = log.rows.front().pose;
  const auto& last = log.rows.back().pose;
  m.closure_error = std::hypot(last.x - first.x, last.y - first.y);

  double sq = 0.0;
  double d_sq = 0.0;
  std::vector<std::pair<double, double>> points;
  points.reserve(log.rows.size());
  for (const auto& r : log.rows) {
    const double e = polyline_distance(r.pose.x, r.pose.y, ref.polyline());
    sq += e * e;
    m.max_deviation = std::max(m.max_deviation, e);
    const double de = r.pose.d - ref.at(r.t).d;
    d_sq += de * de;
    points.emplace_back(r.pose.x, r.pose.y);
  }
  const auto n = static_cast<double>(log.rows.size());
  m.rms_deviation = std::sqrt(sq / n);
  m.d_tracking_rmse = std::sqrt(d_sq / n);
  m.heading_drift = last.phi - ref.at(log.rows.back().t).phi;
  if (ref.arc_radius() && points.size() >= 3) m.estimated_radius = fit_circle(points).radius;

  const auto& poly = ref.polyline();
  for (std::size_t i = 1; i < poly.size(); ++i) {
    m.path_length += std::hypot(poly[i].x - poly[i - 1].x, poly[i].y - poly[i - 1].y);
  }
  return m;
}

std::vector<MetricThreshold> default_thresholds(const ReferenceTrajectory& ref) {
  std::vector<MetricThreshold> out{{"rms_deviation", 1e-4}, {"d_tracking_rmse", 1e-6}};
  const auto& a = ref.vertices().front();
  const auto& b = ref.vertices().back();
  if (std::hypot(b.x - a.x, b.y - a.y) < 1e-9) {
    double perimeter = 0.0;
    const auto& poly = ref.polyline();
    for (std::size_t i = 1; i < poly.size(); ++i) {
      perimeter += std::hypot(poly[i].x - poly[i - 1].x, poly[i].y - poly[i - 1].y);
    }
    out.push_back({"closure_error", 1e-3 * perimeter});
  }
  if (ref.arc_radius()) out.push_back({"relative_radius_error", 1e-3});
  return out;
}

double metric_value(const ScenarioResult& r, const std::string& metric) {
  const auto& m = r.metrics;
  if (metric == "closure_error") return m.closure_error;
  if (metric == "rms_deviation") return m.rms_deviation;
  if (metric == "max_deviation") return m.max_deviation;
  if (metric == "abs_heading_drift") return std::abs(m.heading_drift);
  if (metric == "d_tracking_rmse") return m.d_tracking_rmse;
  if (metric == "relative_radius_error") {
    if (!m.estimated_radius || !r.reference_radius) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("scenario '{}' has no circle fit for relative_radius_error",
                              r.scenario));
    }
    return std::abs(*m.estimated_radius - *r.reference_radius) / *r.reference_radius;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown metric '" + metric + "'");
}

ExperimentReport experiment_report(const std::vector<ScenarioResult>& results) {
  if (results.empty()) throw Error(ErrorCode::kNoResults, "no scenario results to report");
  ExperimentReport report;
  for (const auto& r : results) {
    for (const auto& th : r.thresholds) {
      ReportEntry e;
      e.scenario = r.scenario;
      e.metric = th.metric;
      e.limit = th.limit;
      e.value = metric_value(r, th.metric);
      e.passed = e.value <= th.limit;
      report.passed = report.passed && e.passed;
      report.entries.push_back(e);
    }
  }
  return report;
}

std::string ExperimentReport::to_text() const {
  std::string out;
  for (const auto& e : entries) {
    out += fmt::format("{} {:<12} {:<22} value={:.9g} limit={:.9g}\n", e.passed ? "PASS" : "FAIL",
                       e.scenario, e.metric, e.value, e.limit);
  }
  out += passed ? "overall: PASS\n" : "overall: FAIL\n";
  return out;
}

std::string ExperimentReport::to_csv() const {
  std::string out = "scenario,metric,value,limit,passed\n";
  for (const auto& e : entries) {
    out += fmt::format("{},{},{:.9g},{:.9g},{}\n", e.scenario, e.metric, e.value, e.limit,
                       e.passed ? 1 : 0);
  }
  return out;
}

std::string metrics_csv(const std::string& scenario, const TrajectoryMetrics& m) {
  std::string out =
      "scenario,closure_error,rms_deviation,max_deviation,estimated_radius,heading_drift,"
      "d_tracking_rmse,path_length\n";
  out += fmt::format("{},{:.9g},{:.9g},{:.9g},{},{:.9g},{:.9g},{:.9g}\n", scenario,
                     m.closure_error, m.rms_deviation, m.max_deviation,
                     m.estimated_radius ? fmt::format("{:.9g}", *m.estimated_radius) : "nan",
                     m.heading_drift, m.d_tracking_rmse, m.path_length);
  return out;
}

std::string reference_csv(const ReferenceTrajectory& ref) {
  std::string out = "t,x_E,y_E,phi,d\n";
  for (const auto& p : ref.polyline()) {
    out += fmt::format("{:.9g},{:.9g},{:.9g},{:.9g},{:.9g}\n", p.t, p.x, p.y, p.phi, p.d);
  }
  return out;
}

}  // namespace odd
