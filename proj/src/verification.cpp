#include "odd/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "odd/drive_models.hpp"
#include "odd/errors.hpp"
#include "odd/scenarios.hpp"

namespace odd {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double inf_norm(const BodyTwist& a, const BodyTwist& b) {
  return std::max({std::abs(a.vx - b.vx), std::abs(a.vy - b.vy), std::abs(a.wz - b.wz),
                   std::abs(a.d_dot - b.d_dot)});
}

double inf_norm(const WheelRates& a, const WheelRates& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < 4; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

BodyTwist random_twist(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  BodyTwist t;
  t.vx = u(rng);
  t.vy = u(rng);
  t.wz = 2.0 * u(rng);
  t.d_dot = 0.2 * u(rng);
  return t;
}

Geometry make_geometry(const VerifyOptions& opt) { return Geometry(opt.config.geometry); }

SimConfig open_loop_config(const VerifyOptions& opt) {
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.integrator = Integrator::kRk4;
  cfg.seed = opt.seed;
  return cfg;
}

Scenario builtin(const std::string& name) {
  auto s = find_builtin(name);
  if (!s) throw Error(ErrorCode::kInvalidArgument, "missing builtin scenario " + name);
  return *s;
}

/// Runs `body` with timing and converts thrown errors into a failed result.
/// A positive `time_limit` also fails the check when the body runs longer.
CheckResult timed(int id, std::string name, const std::function<void(CheckResult&)>& body,
                  double time_limit = 0.0) {
  CheckResult r;
  r.id = id;
  r.name = std::move(name);
  const auto start = Clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.runtime_s = seconds_since(start);
  if (time_limit > 0.0 && r.runtime_s >= time_limit) {
    r.passed = false;
    r.detail += fmt::format("; runtime {:.3f} s over {:.0f} s budget", r.runtime_s, time_limit);
  }
  return r;
}

}  // namespace

double integrator_divergence(const Scenario& scenario, const Geometry& geom, double dt) {
  SimConfig cfg;
  cfg.dt = dt;
  cfg.integrator = Integrator::kEuler;
  const TrajectoryLog euler = run_open_loop(scenario, geom, cfg);
  cfg.integrator = Integrator::kRk4;
  const TrajectoryLog rk4 = run_open_loop(scenario, geom, cfg);
  double worst = 0.0;
  const std::size_t n = std::min(euler.rows.size(), rk4.rows.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = euler.rows[i].pose;
    const auto& b = rk4.rows[i].pose;
    worst = std::max(worst, std::hypot(a.x - b.x, a.y - b.y));
  }
  return worst;
}

Scenario balance_scenario(double initial_pitch, double duration) {
  Scenario s;
  s.name = "balance_hold";
  s.mode = LoopMode::kClosed;
  s.initial_pose.pitch = initial_pitch;
  s.segments.push_back(Segment{duration, BodyTwist{}, std::nullopt});
  return s;
}

double longest_saturation_dwell(const TrajectoryLog& log) {
  double longest = 0.0;
  std::optional<double> run_start;
  for (const auto& row : log.telemetry) {
    if (row.saturated) {
      if (!run_start) run_start = row.t;
      longest = std::max(longest, row.t - *run_start);
    } else {
      run_start.reset();
    }
  }
  return longest;
}

CheckResult check_odd_exactness(const VerifyOptions& opt) {
  return timed(1, "ODD layer exactness", [&](CheckResult& r) {
    // Compose the two maps column by column to get the 4x4 product.
    double product_err = 0.0;
    for (double d : {0.25, 0.4, 0.8, 1.7}) {
      const Spacing s(d);
      for (int j = 0; j < 4; ++j) {
        BodyTwist e;
        (j == 0 ? e.vx : j == 1 ? e.vy : j == 2 ? e.wz : e.d_dot) = 1.0;
        product_err = std::max(product_err, inf_norm(odd_forward(odd_inverse(e, s), s), e));
      }
    }
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> ud(0.25, 0.8);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const Spacing s(ud(rng));
      const BodyTwist t = random_twist(rng);
      worst = std::max(worst, inf_norm(odd_forward(odd_inverse(t, s), s), t));
    }
    r.passed = product_err < 1e-12 && worst < 1e-12;
    r.detail = fmt::format("|F*I - I|={:.3g} max round-trip={:.3g} (limit 1e-12)", product_err,
                           worst);
  }, 1.0);
}

CheckResult check_prototype_round_trip(const VerifyOptions& opt) {
  return timed(2, "prototype round-trip", [&](CheckResult& r) {
    std::mt19937_64 rng(opt.seed + 1);
    std::uniform_real_distribution<double> ur(0.03, 0.1);
    std::uniform_real_distribution<double> uw(0.1, 0.4);
    std::uniform_real_distribution<double> ua(20.0 * kDeg, 70.0 * kDeg);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<Geometry> geoms;
    geoms.push_back(make_geometry(opt));
    while (geoms.size() < 20) {
      GeometryParams p;
      p.r = ur(rng);
      p.w = uw(rng);
      const double sign = u01(rng) < 0.5 ? 1.0 : -1.0;
      for (std::size_t k = 0; k < 4; ++k) p.alpha[k] = (k % 2 == 0 ? sign : -sign) * ua(rng);
      try {
        geoms.emplace_back(p);
      } catch (const Error&) {
        // singular somewhere in the spacing range; draw again
      }
    }
    double worst = 0.0;
    int samples = 0;
    for (const auto& g : geoms) {
      std::uniform_real_distribution<double> ud(g.d_min(), g.d_max());
      for (int i = 0; i < 50; ++i, ++samples) {
        const double d = ud(rng);
        const BodyTwist t = random_twist(rng);
        worst = std::max(worst, inf_norm(body_from_wheels(wheels_from_body(t, g, d), g, d), t));
      }
    }
    r.passed = worst < 1e-9;
    r.detail = fmt::format("{} samples over {} geometries, max error={:.3g} (limit 1e-9)", samples,
                           geoms.size(), worst);
  }, 2.0);
}

CheckResult check_frame_consistency(const VerifyOptions& opt) {
  return timed(3, "L/R frame consistency", [&](CheckResult& r) {
    const Geometry g = make_geometry(opt);
    std::mt19937_64 rng(opt.seed + 2);
    std::uniform_real_distribution<double> ud(g.d_min(), g.d_max());
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double d = ud(rng);
      const BodyTwist t = random_twist(rng);
      worst = std::max(worst, inf_norm(wheels_from_body(t, g, d), wheels_from_body_via_right(t, g, d)));
    }
    r.passed = worst < 1e-12;
    r.detail = fmt::format("max |L path - R path|={:.3g} rad/s (limit 1e-12)", worst);
  });
}

CheckResult check_singularity_law(const VerifyOptions& opt) {
  return timed(4, "singularity law", [&](CheckResult& r) {
    std::mt19937_64 rng(opt.seed + 3);
    std::uniform_real_distribution<double> ud(0.25, 0.8);
    std::uniform_real_distribution<double> uw(0.05, 0.5);
    const std::array<double, 4> alt{1.0, -1.0, 1.0, -1.0};
    double sigma_err = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double d = ud(rng);
      const double w = uw(rng);
      sigma_err = std::max(sigma_err, std::abs(sigma1(alt, d, w) - 4.0 * d));
    }

    // Degenerate patterns solve sigma1 = 0 for T4; the rest are drawn freely.
    std::uniform_real_distribution<double> ut(-2.0, 2.0);
    std::uniform_real_distribution<double> ur(0.03, 0.1);
    int agree = 0;
    int total = 0;
    int degenerate = 0;
    for (int i = 0; i < 200; ++i) {
      const double d = ud(rng);
      const double w = uw(rng);
      const double rr = ur(rng);
      std::array<double, 4> T{ut(rng), ut(rng), ut(rng), ut(rng)};
      if (i % 2 == 0) {
        if (i % 4 == 0) {
          T = {T[0], T[0], T[0], T[0]};
        } else {
          const double den = -T[0] * d + T[0] * w + T[1] * d;
          if (std::abs(den) < 1e-3) continue;
          T[3] = -(T[0] * T[2] * d - T[1] * T[2] * d - T[1] * T[2] * w) / den;
        }
      }
      const double s1 = sigma1(T, d, w);
      // det = sigma1 / (d r^4), so rescale before comparing against zero.
      const double det = detail::group_to_wheels_matrix(rr, w, T, d).determinant();
      const double scaled = det * d * std::pow(rr, 4);
      const bool sigma_zero = std::abs(s1) < 1e-9;
      if (!sigma_zero && std::abs(s1) < 1e-6) continue;  // too close to call either way
      const bool det_zero = std::abs(scaled) < 1e-9;
      ++total;
      degenerate += sigma_zero ? 1 : 0;
      agree += sigma_zero == det_zero ? 1 : 0;
    }
    r.passed = sigma_err < 1e-12 && agree == total && degenerate > 0 && degenerate < total;
    r.detail = fmt::format(
        "max |sigma1 - 4d|={:.3g}; det==0 iff sigma1==0 on {}/{} patterns ({} degenerate)",
        sigma_err, agree, total, degenerate);
  });
}

CheckResult check_printed_matrices(const VerifyOptions& opt) {
  return timed(5, "printed-matrix cross-check", [&](CheckResult& r) {
    const Geometry g = make_geometry(opt);
    const DerivationReport rep = cross_check_printed_matrices(g, 0.5 * (g.d_min() + g.d_max()));
    r.passed = rep.complete();
    r.detail = fmt::format("{} entries: {} agree, {} discrepant, {} unparseable", rep.entries.size(),
                           rep.count(PrintedEntryCheck::Status::kAgree),
                           rep.count(PrintedEntryCheck::Status::kDiscrepancy),
                           rep.count(PrintedEntryCheck::Status::kUnparseable));
  });
}

CheckResult check_circle(const VerifyOptions& opt) {
  return timed(6, "circle reproduction", [&](CheckResult& r) {
    const Geometry g = make_geometry(opt);
    const Scenario s = builtin("circle_x");
    const TrajectoryLog log = run_open_loop(s, g, open_loop_config(opt));
    const TrajectoryMetrics m = compute_metrics(log, analytic_reference(s));
    const double radius = m.estimated_radius.value_or(0.0);
    const double rel = std::abs(radius - 0.5) / 0.5;
    r.passed = rel <= 1e-3 && m.closure_error < 1e-3;
    r.detail = fmt::format("radius={:.9g} m (rel err {:.3g}, limit 1e-3) closure={:.3g} m (limit 1e-3)",
                           radius, rel, m.closure_error);
  }, 5.0);
}

CheckResult check_polygons(const VerifyOptions& opt) {
  return timed(7, "square/rhombus reproduction", [&](CheckResult& r) {
    const Geometry g = make_geometry(opt);
    r.passed = true;
    for (const char* name : {"square", "rhombus"}) {
      const Scenario s = builtin(name);
      const TrajectoryLog log = run_open_loop(s, g, open_loop_config(opt));
      const ReferenceTrajectory ref = analytic_reference(s);
      const TrajectoryMetrics m = compute_metrics(log, ref);
      double vertex_err = 0.0;
      for (const RefState& v : ref.vertices()) {
        const PlatformPose p = log.pose_at(v.t);
        vertex_err = std::max(vertex_err, std::hypot(p.x - v.x, p.y - v.y));
      }
      const double closure_limit = 1e-3 * m.path_length;
      const bool ok = m.closure_error < closure_limit && vertex_err < 1e-4;
      r.passed = r.passed && ok;
      if (!r.detail.empty()) r.detail += "; ";
      r.detail += fmt::format("{}: closure={:.3g} m (limit {:.3g}) vertex err={:.3g} m (limit 1e-4)",
                              name, m.closure_error, closure_limit, vertex_err);
    }
  });
}

CheckResult check_reconfiguration(const VerifyOptions& opt) {
  return timed(8, "reconfiguration neutrality", [&](CheckResult& r) {
    const Geometry g = make_geometry(opt);
    const Scenario s = builtin("reconfig_x");
    const TrajectoryLog log = run_open_loop(s, g, open_loop_config(opt));
    const ReferenceTrajectory ref = analytic_reference(s);
    double max_y = 0.0;
    double max_phi = 0.0;
    double max_d = 0.0;
    double d_peak = 0.0;
    for (const auto& row : log.rows) {
      max_y = std::max(max_y, std::abs(row.pose.y));
      max_phi = std::max(max_phi, std::abs(row.pose.phi));
      max_d = std::max(max_d, std::abs(row.pose.d - ref.at(row.t).d));
      d_peak = std::max(d_peak, row.pose.d);
    }
    r.passed = max_y < 1e-6 && max_phi < 1e-9 && max_d < 1e-9;
    r.detail = fmt::format(
        "max|y|={:.3g} m (1e-6) max|phi|={:.3g} rad (1e-9) max|d-d_ref|={:.3g} m (1e-9) peak d={:.9g}",
        max_y, max_phi, max_d, d_peak);
  });
}

CheckResult check_balancing(const VerifyOptions& opt) {
  return timed(9, "balancing loop", [&](CheckResult& r) {
    const Geometry g = make_geometry(opt);
    SimConfig cfg = opt.config.sim;
    cfg.pendulum.enabled = true;
    cfg.seed = opt.seed;
    const Scenario s = balance_scenario(5.0 * kDeg, 5.0);
    const TrajectoryLog a = run_closed_loop(s, opt.config.control, g, cfg);
    const TrajectoryLog b = run_closed_loop(s, opt.config.control, g, cfg);
    double late = 0.0;
    for (const auto& row : a.rows) {
      if (row.t >= 3.0) late = std::max(late, std::abs(row.pose.pitch));
    }
    const double dwell = longest_saturation_dwell(a);
    const bool same = a.to_csv() == b.to_csv();
    r.passed = late < 0.5 * kDeg && dwell <= 0.5 && same;
    r.detail = fmt::format("max|pitch| after 3 s={:.3g} deg (0.5) longest saturation={:.3g} s (0.5) "
                           "reruns identical={}",
                           late / kDeg, dwell, same);
  });
}

CheckResult check_integrator_convergence(const VerifyOptions& opt) {
  return timed(10, "integrator convergence", [&](CheckResult& r) {
    const Geometry g = make_geometry(opt);
    const Scenario s = builtin("circle_x");
    const double coarse = integrator_divergence(s, g, 1e-3);
    const double fine = integrator_divergence(s, g, 5e-4);
    const double ratio = coarse / fine;
    r.passed = ratio >= 2.0;
    r.detail = fmt::format("divergence dt=1e-3: {:.6g} m, dt=5e-4: {:.6g} m, ratio={:.9g} (>= 2)",
                           coarse, fine, ratio);
  });
}

CheckResult check_determinism(const VerifyOptions& opt) {
  return timed(11, "determinism", [&](CheckResult& r) {
    const Geometry g = make_geometry(opt);
    SimConfig cfg = opt.config.sim;
    cfg.seed = opt.seed;
    cfg.noise.enabled = true;
    int identical = 0;
    const auto all = builtin_scenarios();
    for (const auto& s : all) {
      const std::string a = run_closed_loop(s, opt.config.control, g, cfg).to_csv();
      const std::string b = run_closed_loop(s, opt.config.control, g, cfg).to_csv();
      identical += a == b ? 1 : 0;
    }
    r.passed = identical == static_cast<int>(all.size());
    r.detail = fmt::format("{}/{} closed-loop noisy runs byte-identical", identical, all.size());
  });
}

std::vector<CheckResult> run_acceptance(const VerifyOptions& opt) {
  (void)make_geometry(opt);
  return {check_odd_exactness(opt),       check_prototype_round_trip(opt),
          check_frame_consistency(opt),   check_singularity_law(opt),
          check_printed_matrices(opt),    check_circle(opt),
          check_polygons(opt),            check_reconfiguration(opt),
          check_balancing(opt),           check_integrator_convergence(opt),
          check_determinism(opt)};
}

std::string format_check(const CheckResult& r, bool with_timing) {
  std::string line =
      fmt::format("{} [{:2}] {:<28} {}", r.passed ? "PASS" : "FAIL", r.id, r.name, r.detail);
  if (with_timing) line += fmt::format(" ({:.3f} s)", r.runtime_s);
  return line;
}

}  // namespace odd
