#pragma once

#include "ofw/core.hpp"

#include <string>
#include <vector>

namespace ofw::cli {

struct RunConfig {
  std::string experiment = "synthetic-submodular";
  std::string algorithm = "meta-fw";
  int horizon = 32;     // T
  int inner_steps = 0;  // K; 0 -> ceil(T^{3/2})
  std::uint64_t seed = 1;
  double sigma = 0.0;
  std::string output = "run";  // writes <output>.csv and <output>.json
  std::string ratings_path;
  std::string topics_path;
  std::string network_path = "data/zachary_digraph.txt";
  double ratings_lo = -10.0;
  double ratings_hi = 10.0;
  int batch = 0;               // 0 -> experiment default
  double budget = -1.0;        // < 0 -> experiment default
  double flow_value = -1.0;    // < 0 -> value from the network file
  double lambda = -1.0;        // < 0 -> sqrt(T)
  double trace_radius = -1.0;  // < 0 -> nuclear norm of the target
  int offline_steps = 0;       // 0 -> 200 hindsight / 2000 stochastic
  int jobs = 1;
};

const std::vector<std::string>& experiment_names();
const std::vector<std::string>& algorithm_names();

// Thrown by parse_config after printing --help; run_cli maps it to exit 0.
struct HelpRequested {};

// Flags override config-file values; overrides are logged to stderr.
RunConfig parse_config(int argc, const char* const* argv);

// Throws ConfigError on invalid or incompatible settings.
void validate_config(const RunConfig& config);

int effective_inner_steps(const RunConfig& config);

// Executes one configured run: plays the algorithm for T rounds, writes the
// regret CSV plus a JSON sidecar, and validates the CSV. Returns 0 on success.
int run(const RunConfig& config);

// Entry point used by the binary: parse, fan out --jobs seeds, map errors to
// exit codes (2 config/usage, 3 I/O, 1 other).
int run_cli(int argc, const char* const* argv);

}  // namespace ofw::cli
