#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

namespace qfl::cli {

enum ExitCode : int {
  kOk = 0,
  kValidationFailure = 1,
  kCheckFailure = 2,
  kMalformedInput = 3,
  kDimensionCap = 4,
};

/// Settings that may come from the scenario, the environment (QFL_*) or flags,
/// applied in that order of increasing precedence.
struct Overrides {
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> cutoff;
  std::optional<double> tol;
};

/// Reads QFL_OUT, QFL_SEED, QFL_CUTOFF and QFL_TOL. Unparseable values throw MalformedInput.
Overrides env_overrides();

struct RunResult {
  int exit_code = kOk;
  nlohmann::json report;
  std::string report_path;
  std::string csv_path;
};

/// Executes one scenario document and writes its artifacts into the resolved
/// output directory. Library errors are mapped to exit codes, never rethrown.
RunResult run_scenario(const nlohmann::json& scenario, const Overrides& env, const Overrides& flags,
                       std::ostream& log);

/// Entry point behind the qfl executable.
int main(int argc, char** argv);

}  // namespace qfl::cli
