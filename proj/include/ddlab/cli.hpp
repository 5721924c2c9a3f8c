#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ddlab {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitNumerical = 2 };

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// The oracle-equivalence checks behind `ddlab selfcheck`.
std::vector<CheckResult> run_selfchecks();

/// Entry point of the `ddlab` tool; argv[0] is the program name.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ddlab
