#pragma once

#include <iosfwd>

namespace lcflow {

/// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

/// Subcommands: simulate, sweep, diagnose, rate-fit. Messages go to out/err.
int cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int cli(int argc, const char* const* argv);

}  // namespace lcflow
