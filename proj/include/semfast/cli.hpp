#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace semfast {

enum ExitCode : int { exit_ok = 0, exit_runtime = 1, exit_usage = 2 };

/// Entry point of the `semfast` tool. `args` includes the program name.
/// Errors are reported on `err` as a single line "error: <kind>: <message>".
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

} // namespace semfast
