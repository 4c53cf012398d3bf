#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dronehaul {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitParse = 2,
  kExitUnreachable = 3,
  kExitIo = 4,
};

/// Entry point of the `dronehaul` tool; args exclude the program name.
/// Results go to `out`, diagnostics and the JSON run report to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dronehaul
