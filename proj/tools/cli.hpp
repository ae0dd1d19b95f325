#pragma once

#include <iosfwd>

namespace distkern::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitComputation = 1;
inline constexpr int kExitUsage = 2;

/// Parses argv and runs one subcommand. JSON reports go to `out` (or to the
/// --output file), diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace distkern::cli
