#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace odd::cli {

/// Everything `sim` needs after flag parsing.
struct RunConfig {
  std::string config_path;
  std::string scenario = "square";  // builtin name or "all"
  std::string scenario_file;
  std::string output_dir;
  std::uint64_t seed = 42;
  std::optional<double> dt;
  std::optional<std::string> integrator;
  std::optional<std::string> actuator;
  bool closed_loop = false;
  bool plot = false;
};

/// Output directory used when --out is absent.
inline constexpr const char* kOutputDirEnv = "ODD_OUTPUT_DIR";

/// Parses and runs one command line (without the program name). Exit codes:
/// 0 success, 1 operation error or failed check, 2 usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace odd::cli
