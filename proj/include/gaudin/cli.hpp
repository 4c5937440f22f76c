#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "gaudin/analysis.hpp"
#include "gaudin/errors.hpp"
#include "gaudin/model.hpp"
#include "gaudin/solver.hpp"

namespace gaudin::cli {

enum class Command { solve, verify, scan_minors, limits, compare_bc, multistart };
enum class OutputFormat { json, csv };

/// Bad flag, missing field or inconsistent input; maps to exit code 2.
class UsageError : public Error {
public:
  using Error::Error;
};

struct RunConfig {
  Command command = Command::solve;
  SystemSpec spec;
  QuantumNumbers n;
  SolverConfig solver;
  OutputFormat output_format = OutputFormat::json;
  std::optional<std::string> output_path;
  std::uint64_t seed = 0;
  // multistart
  int starts = 20;
  double box = 50.0;
  // scan-minors
  int samples = 100;
  Sampler sampler = Sampler::perturbed;
  double step_scale = 0.1;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Builds a RunConfig from command-line arguments (command first, no program
/// name) layered over an optional JSON config document. Flags win.
RunConfig parse_config(const std::vector<std::string>& args,
                       const std::optional<std::string>& file_text = std::nullopt);

/// Canonical JSON form of a config; parse_config accepts it back unchanged.
nlohmann::ordered_json to_json(const RunConfig& cfg);

std::string command_name(Command c);

/// Flag summary printed for --help.
std::string usage_text();

/// Runs one command, writing the data document to `out` and diagnostics to `err`.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Full program: handles --config and --out, returns the process exit code.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gaudin::cli
