#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hgain::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kOk = 0,
    kValidationError = 1,
    kCheckFailed = 2,
};

/// Runs one invocation. `args` excludes the program name. Regular output goes
/// to `out` unless --out names a file; diagnostics go to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Shortest round-trip decimal.
std::string format_shortest(double v);
/// 17 significant digits, %.17g style.
std::string format_g17(double v);

}  // namespace hgain::cli
