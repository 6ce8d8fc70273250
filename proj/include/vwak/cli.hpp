#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vwak {

/// Exit codes of run_command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitUndecided = 2;
inline constexpr int kExitConfig = 3;

/// Runs one subcommand; args excludes the program name. Failing invariants
/// are named on `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace vwak
