#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace flag::cli {

enum ExitCode : int { kOk = 0, kRuntimeError = 1, kUsageError = 2 };

/// Runs flagtool with the given arguments (args[0] is the program name) and
/// returns the process exit code. Reports go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace flag::cli
