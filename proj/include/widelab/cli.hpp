#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace widelab {

/// Parses `args` (without the program name), runs the subcommand and returns
/// the process exit code: 0 on success, 2 for usage and configuration
/// errors, 1 for runtime failures.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace widelab
