#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "odd/config.hpp"
#include "odd/printed_matrices.hpp"
#include "odd/scenario.hpp"
#include "odd/simulator.hpp"

namespace odd {

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double runtime_s = 0.0;
};

struct VerifyOptions {
  AppConfig config;
  std::uint64_t seed = 42;
};

/// Max position gap between Euler and RK4 open-loop runs of a scenario.
double integrator_divergence(const Scenario& scenario, const Geometry& geom, double dt);

/// Stationary hold with the pendulum released from `initial_pitch`.
Scenario balance_scenario(double initial_pitch, double duration);

/// Longest contiguous saturated stretch in the closed-loop telemetry, s.
double longest_saturation_dwell(const TrajectoryLog& log);

CheckResult check_odd_exactness(const VerifyOptions& opt);
CheckResult check_prototype_round_trip(const VerifyOptions& opt);
CheckResult check_frame_consistency(const VerifyOptions& opt);
CheckResult check_singularity_law(const VerifyOptions& opt);
CheckResult check_printed_matrices(const VerifyOptions& opt);
CheckResult check_circle(const VerifyOptions& opt);
CheckResult check_polygons(const VerifyOptions& opt);
CheckResult check_reconfiguration(const VerifyOptions& opt);
CheckResult check_balancing(const VerifyOptions& opt);
CheckResult check_integrator_convergence(const VerifyOptions& opt);
/// Two identical runs of every builtin scenario must serialize to the same bytes.
CheckResult check_determinism(const VerifyOptions& opt);

/// All checks in order. Throws Error(kSingularGeometry) and friends when the
/// configured geometry itself is unusable.
std::vector<CheckResult> run_acceptance(const VerifyOptions& opt);

/// One report line; timings are left out unless asked for so that reruns
/// print identical reports.
std::string format_check(const CheckResult& r, bool with_timing = false);

}  // namespace odd
