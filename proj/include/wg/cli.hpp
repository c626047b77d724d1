#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wg {

inline constexpr const char* kToolName = "wg";
inline constexpr const char* kToolVersion = "0.1.0";

// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitChecksFailed = 1,
  kExitUsage = 2,
  kExitValidation = 3,
  kExitInternal = 4,
};

/// Runs one command line (without the program name). Reports go to `out`,
/// diagnostics to `err`; the return value is an ExitCode.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wg
