#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace oce::cli {

/// Exit statuses of `run`.
enum ExitCode : int { kOk = 0, kDomainError = 1, kIoError = 2 };

/// Parses `args` (program name excluded), dispatches the subcommand and
/// writes the human-readable summary to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace oce::cli
