#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rrcov::cli {

// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kParseError = 2,
  kValidationError = 3,
  kPdError = 4,
  kResourceError = 5,
  kInternalError = 6,
};

/// Runs the command line (args excludes the program name). Data goes to
/// `out` unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rrcov::cli
