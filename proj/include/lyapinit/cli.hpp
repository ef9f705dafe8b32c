#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lyapinit::cli {

/// Exit statuses of the command-line front end.
enum ExitCode : int { kSuccess = 0, kUsage = 1, kNumerical = 2, kIo = 3 };

/// Runs the `lyapinit` command line. `argv[0]` is the program name.
/// Results go to `out` (or to --out files); diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Same, with arguments after the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lyapinit::cli
