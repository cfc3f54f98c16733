#ifndef SMMIMO_CLI_HPP
#define SMMIMO_CLI_HPP

#include <string>
#include <vector>

namespace smmimo {

inline constexpr const char* kToolVersion = "0.1.0";

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitConfigError = 1, kExitRuntimeError = 2 };

/// Entry point shared by the `smmimo` binary and the tests. `args` excludes
/// the program name. Data goes to files only; diagnostics go to stderr.
int run_cli(const std::vector<std::string>& args);

}  // namespace smmimo

#endif  // SMMIMO_CLI_HPP
