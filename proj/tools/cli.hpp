#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rfim::cli {

enum ExitCode : int { kOk = 0, kInvalid = 1, kFailed = 2 };

/// Parses `args` (without the program name) and runs one subcommand. Results
/// go to `out` unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rfim::cli
