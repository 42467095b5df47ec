#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace isospec::cli {

/// Exit codes of the command-line front end.
enum ExitCode : int {
  kReachable = 0,
  kInputError = 1,
  kUnreachable = 2,
  kUnknown = 3,
};

/// Runs one command; `args` excludes the program name. Documents go to `out`,
/// diagnostics to `err` (verbosity from ISOSPEC_LOG: quiet, info, debug).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace isospec::cli
