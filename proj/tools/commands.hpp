#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stregion::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kOk = 0, kPipelineError = 1, kConfigError = 2 };

/// Runs `stregion <args...>` (args excludes the program name) and returns
/// the process exit code. Normal output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace stregion::cli
