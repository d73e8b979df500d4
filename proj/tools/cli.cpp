#include "cli.hpp"

#include <array>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "odd/config.hpp"
#include "odd/drive_models.hpp"
#include "odd/errors.hpp"
#include "odd/mecanum_kinematics.hpp"
#include "odd/printed_matrices.hpp"
#include "odd/scenarios.hpp"
#include "odd/simulator.hpp"
#include "odd/verification.hpp"
#include "svg_plot.hpp"

namespace odd::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct KinArgs {
  std::vector<double> rates{0.0, 0.0, 0.0, 0.0};
  double vx = 0.0;
  double vy = 0.0;
  double wz = 0.0;
  double d_dot = 0.0;
  double vx_left = 0.0;
  double vy_left = 0.0;
  double vx_right = 0.0;
  double vy_right = 0.0;
  double d = 0.4;
  bool json = false;
};

std::string num(double v) { return fmt::format("{:.9g}", v); }

json twist_json(const BodyTwist& t) {
  return {{"vx", t.vx}, {"vy", t.vy}, {"wz", t.wz}, {"d_dot", t.d_dot}};
}

json group_json(const GroupVelocities& g) {
  return {{"vx_left", g.vx_left}, {"vy_left", g.vy_left}, {"vx_right", g.vx_right},
          {"vy_right", g.vy_right}};
}

void print_twist(std::ostream& out, const BodyTwist& t) {
  out << "vx_B  = " << num(t.vx) << " m/s\n"
      << "vy_B  = " << num(t.vy) << " m/s\n"
      << "wz_B  = " << num(t.wz) << " rad/s\n"
      << "d_dot = " << num(t.d_dot) << " m/s\n";
}

void print_group(std::ostream& out, const GroupVelocities& g) {
  out << "vx_L = " << num(g.vx_left) << " m/s\n"
      << "vy_L = " << num(g.vy_left) << " m/s\n"
      << "vx_R = " << num(g.vx_right) << " m/s\n"
      << "vy_R = " << num(g.vy_right) << " m/s\n";
}

int report_error(const Error& e, std::ostream& err) {
  err << "error: " << e.what() << "\n";
  return 1;
}

AppConfig load_app_config(const std::string& path) {
  return path.empty() ? AppConfig{} : load_config_file(path);
}

int run_kin(const std::string& which, const KinArgs& a, const std::string& config_path,
            std::ostream& out, std::ostream& err) {
  const AppConfig cfg = load_app_config(config_path);
  const Spacing s(a.d);
  json j{{"command", which}, {"d", a.d}};
  if (which == "odd-fk") {
    const BodyTwist t =
        odd_forward(GroupVelocities{a.vx_left, a.vy_left, a.vx_right, a.vy_right}, s);
    j["twist"] = twist_json(t);
    if (!a.json) print_twist(out, t);
  } else if (which == "odd-ik") {
    const GroupVelocities g = odd_inverse(BodyTwist{a.vx, a.vy, a.wz, a.d_dot}, s);
    j["groups"] = group_json(g);
    if (!a.json) print_group(out, g);
  } else {
    try {
      const Geometry geom(cfg.geometry);
      if (which == "fk") {
        WheelRates rates;
        for (std::size_t i = 0; i < 4; ++i) rates[i] = a.rates[i];
        const BodyTwist t = body_from_wheels(rates, geom, a.d);
        j["twist"] = twist_json(t);
        if (!a.json) print_twist(out, t);
      } else {
        const WheelRates rates = wheels_from_body(BodyTwist{a.vx, a.vy, a.wz, a.d_dot}, geom, a.d);
        j["theta_dot"] = rates.theta_dot;
        if (!a.json) {
          for (std::size_t i = 0; i < 4; ++i) {
            out << "theta" << i + 1 << "_dot = " << num(rates[i]) << " rad/s\n";
          }
        }
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kSingularGeometry) throw;
      std::array<double, 4> T{};
      for (std::size_t i = 0; i < 4; ++i) T[i] = std::tan(cfg.geometry.alpha[i]);
      const double s1 = sigma1(T, a.d, cfg.geometry.w);
      if (a.json) {
        out << json{{"error", "SingularGeometry"}, {"message", e.message()}, {"sigma1", s1}}.dump()
            << "\n";
      }
      err << "error: " << e.what() << " (sigma1 at d = " << num(a.d) << " m: " << num(s1) << ")\n";
      return 1;
    }
  }
  if (a.json) out << j.dump() << "\n";
  return 0;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  f << text;
  if (!f) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

struct SimOutcome {
  std::string log;
  std::string error;
};

SimOutcome simulate_one(const Scenario& scenario, const AppConfig& cfg, const RunConfig& rc,
                        const fs::path& dir) {
  SimOutcome res;
  try {
    const Geometry geom(cfg.geometry);
    const bool closed = rc.closed_loop || scenario.mode == LoopMode::kClosed;
    const TrajectoryLog log = closed ? run_closed_loop(scenario, cfg.control, geom, cfg.sim)
                                     : run_open_loop(scenario, geom, cfg.sim);
    const fs::path traj = dir / (scenario.name + "_trajectory.csv");
    write_file(traj, log.to_csv());
    res.log += "wrote " + traj.string() + "\n";
    if (closed) {
      std::ostringstream tel;
      log.write_telemetry_csv(tel);
      const fs::path p = dir / (scenario.name + "_telemetry.csv");
      write_file(p, tel.str());
      res.log += "wrote " + p.string() + "\n";
    }

    std::optional<ReferenceTrajectory> ref;
    try {
      ref = analytic_reference(scenario);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kUnsupportedSegment) throw;
      res.log += "note: " + e.message() + "; reference and metrics skipped\n";
    }
    if (ref) {
      const fs::path rp = dir / (scenario.name + "_reference.csv");
      write_file(rp, reference_csv(*ref));
      res.log += "wrote " + rp.string() + "\n";
      const TrajectoryMetrics m = compute_metrics(log, *ref);
      const fs::path mp = dir / (scenario.name + "_metrics.csv");
      write_file(mp, metrics_csv(scenario.name, m));
      res.log += "wrote " + mp.string() + "\n";
      res.log += fmt::format("{}: closure={:.3g} m rms={:.3g} m max={:.3g} m", scenario.name,
                             m.closure_error, m.rms_deviation, m.max_deviation);
      if (m.estimated_radius) res.log += fmt::format(" radius={:.9g} m", *m.estimated_radius);
      res.log += "\n";
    }

    if (rc.plot) {
      std::vector<plot::Series> series;
      if (ref) {
        plot::Series r{"reference", "#888888", {}, true};
        for (const auto& p : ref->polyline()) r.points.emplace_back(p.x, p.y);
        series.push_back(std::move(r));
      }
      plot::Series a{closed ? "simulated (closed loop)" : "simulated (open loop)", "#1f5fbf", {},
                     false};
      for (const auto& row : log.rows) a.points.emplace_back(row.pose.x, row.pose.y);
      series.push_back(std::move(a));
      const fs::path sp = dir / (scenario.name + ".svg");
      write_file(sp, plot::xy_plot(scenario.name, series));
      res.log += "wrote " + sp.string() + "\n";
    }
  } catch (const std::exception& e) {
    res.error = fmt::format("{}: {}", scenario.name, e.what());
  }
  return res;
}

int run_sim(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  AppConfig cfg = load_app_config(rc.config_path);
  cfg.sim.seed = rc.seed;
  if (rc.dt) cfg.sim.dt = *rc.dt;
  if (rc.integrator) {
    cfg.sim.integrator = *rc.integrator == "euler" ? Integrator::kEuler : Integrator::kRk4;
  }
  if (rc.actuator) {
    cfg.sim.actuator.mode = *rc.actuator == "lag"     ? ActuatorMode::kLag
                            : *rc.actuator == "motor" ? ActuatorMode::kMotor
                                                      : ActuatorMode::kIdeal;
  }
  cfg.sim.validate();
  (void)Geometry(cfg.geometry);

  std::vector<Scenario> scenarios;
  if (!rc.scenario_file.empty()) {
    scenarios.push_back(load_scenario_file(rc.scenario_file));
  } else if (rc.scenario == "all") {
    scenarios = builtin_scenarios();
  } else if (auto s = find_builtin(rc.scenario)) {
    scenarios.push_back(*s);
  } else {
    err << "error: unknown scenario '" << rc.scenario << "' (builtins:";
    for (const auto& n : builtin_names()) err << " " << n;
    err << ", all)\n";
    return 2;
  }

  std::string dir = rc.output_dir;
  if (dir.empty()) {
    const char* env = std::getenv(kOutputDirEnv);
    dir = env != nullptr && *env != '\0' ? env : ".";
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    err << "error: IoError: cannot create output directory " << dir << ": " << ec.message()
        << "\n";
    return 1;
  }

  std::vector<SimOutcome> results(scenarios.size());
  if (scenarios.size() == 1) {
    results[0] = simulate_one(scenarios[0], cfg, rc, dir);
  } else {
    std::vector<std::thread> workers;
    workers.reserve(scenarios.size());
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
      workers.emplace_back([&, i] { results[i] = simulate_one(scenarios[i], cfg, rc, dir); });
    }
    for (auto& w : workers) w.join();
  }

  int code = 0;
  for (const auto& r : results) {
    out << r.log;
    if (!r.error.empty()) {
      err << "error: " << r.error << "\n";
      code = 1;
    }
  }
  return code;
}

int run_verify(const std::string& config_path, std::uint64_t seed, bool derivation_log,
               std::ostream& out) {
  VerifyOptions opt;
  opt.config = load_app_config(config_path);
  opt.seed = seed;
  const Geometry geom(opt.config.geometry);
  if (derivation_log) {
    out << cross_check_printed_matrices(geom, 0.5 * (geom.d_min() + geom.d_max())).to_text()
        << "\n";
  }
  bool all = true;
  for (const auto& r : run_acceptance(opt)) {
    out << format_check(r) << "\n";
    all = all && r.passed;
  }
  out << (all ? "overall: PASS\n" : "overall: FAIL\n");
  return all ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Omni differential drive kinematics, simulation and verification", "odd_cli"};
  app.fallthrough();
  app.require_subcommand(0, 1);

  std::string config_path;
  bool print_config = false;
  app.add_option("--config", config_path, "YAML config with geometry/gains/sim sections")
      ->check(CLI::ExistingFile);
  app.add_flag("--print-config", print_config, "Print the effective config (all defaults) and exit");

  KinArgs ka;
  auto* kin = app.add_subcommand("kin", "Kinematics calculator");
  kin->require_subcommand(1);
  auto add_common = [&](CLI::App* c) {
    c->fallthrough();
    c->add_option("--d", ka.d, "Wheel spacing d [m]")->capture_default_str();
    c->add_flag("--json", ka.json, "Machine-readable output");
  };
  auto add_twist = [&](CLI::App* c) {
    c->add_option("--vx", ka.vx, "Body x velocity [m/s]");
    c->add_option("--vy", ka.vy, "Body y velocity [m/s]");
    c->add_option("--wz", ka.wz, "Body yaw rate [rad/s]");
    c->add_option("--d-dot", ka.d_dot, "Spacing rate [m/s]");
  };
  auto* fk = kin->add_subcommand("fk", "Wheel rates -> body twist");
  fk->add_option("--rates", ka.rates, "Wheel rates theta1..theta4 [rad/s]")->expected(4);
  add_common(fk);
  auto* ik = kin->add_subcommand("ik", "Body twist -> wheel rates");
  add_twist(ik);
  add_common(ik);
  auto* ofk = kin->add_subcommand("odd-fk", "Group velocities -> body twist");
  ofk->add_option("--vxl", ka.vx_left, "Left group x velocity [m/s]");
  ofk->add_option("--vyl", ka.vy_left, "Left group y velocity [m/s]");
  ofk->add_option("--vxr", ka.vx_right, "Right group x velocity [m/s]");
  ofk->add_option("--vyr", ka.vy_right, "Right group y velocity [m/s]");
  add_common(ofk);
  auto* oik = kin->add_subcommand("odd-ik", "Body twist -> group velocities");
  add_twist(oik);
  add_common(oik);
  kin->fallthrough();

  RunConfig rc;
  double dt_value = 0.0;
  std::string integrator;
  std::string actuator;
  auto* sim = app.add_subcommand("sim", "Run scenarios and write CSV logs");
  sim->fallthrough();
  sim->add_option("--scenario", rc.scenario, "Builtin scenario name or 'all'")
      ->capture_default_str();
  sim->add_option("--scenario-file", rc.scenario_file, "YAML scenario file")
      ->check(CLI::ExistingFile);
  sim->add_option("--out", rc.output_dir,
                  std::string("Output directory (default $") + kOutputDirEnv + " or .)");
  sim->add_option("--seed", rc.seed, "RNG seed")->capture_default_str();
  auto* dt_opt = sim->add_option("--dt", dt_value, "Simulation step [s]");
  sim->add_option("--integrator", integrator, "euler or rk4")
      ->check(CLI::IsMember({"euler", "rk4"}));
  sim->add_option("--actuator", actuator, "ideal, lag or motor")
      ->check(CLI::IsMember({"ideal", "lag", "motor"}));
  sim->add_flag("--closed-loop", rc.closed_loop, "Run through the control stack");
  sim->add_flag("--plot", rc.plot, "Also write an SVG of actual vs reference path");

  std::uint64_t verify_seed = 42;
  bool derivation_log = false;
  auto* verify = app.add_subcommand("verify", "Run the acceptance battery");
  verify->fallthrough();
  verify->add_option("--seed", verify_seed, "RNG seed")->capture_default_str();
  verify->add_flag("--derivation-log", derivation_log,
                   "Print the printed-matrix cross-check before the battery");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (print_config) {
      out << serialize_config(load_app_config(config_path));
      return 0;
    }
    if (*kin) {
      for (auto* sub : {fk, ik, ofk, oik}) {
        if (*sub) return run_kin(sub->get_name(), ka, config_path, out, err);
      }
    }
    if (*sim) {
      rc.config_path = config_path;
      if (dt_opt->count() > 0) rc.dt = dt_value;
      if (!integrator.empty()) rc.integrator = integrator;
      if (!actuator.empty()) rc.actuator = actuator;
      return run_sim(rc, out, err);
    }
    if (*verify) return run_verify(config_path, verify_seed, derivation_log, out);
  } catch (const Error& e) {
    return report_error(e, err);
  }
  out << app.help();
  return 2;
}

}  // namespace odd::cli
