#pragma once

// Batch front end: dispatches one configured command and writes report.json
// plus CSV profiles into the output directory.

#include <iosfwd>
#include <string>

#include "radcrit/config.hpp"

namespace radcrit {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitNonConvergence = 2 };

struct RunResult {
  int exit_code = kExitOk;
  /// One-line human summary (also printed by the tool).
  std::string summary;
  /// Path of the JSON report.
  std::string report_path;
};

/// Runs the command of `config` and writes its outputs under config.out.
/// Library errors raised by the command become exit code 1 with the message
/// in the summary and in the report.
RunResult run(const RunConfig& config, std::ostream& log);

}  // namespace radcrit
