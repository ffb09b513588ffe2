#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace csa::cli {

inline constexpr const char* tool_version = "csa 1.0.0";

// Exit statuses.
inline constexpr int exit_ok = 0;
inline constexpr int exit_runtime = 1;
inline constexpr int exit_usage = 2;

// Runs the command line `args` (args[0] is the program name). Result tables
// go to `out` unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace csa::cli
