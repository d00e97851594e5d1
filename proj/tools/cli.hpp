#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace xol::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitCondition = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitData = 65;

// Runs the command line `args` (without the program name), writing results
// to `out` and diagnostics to `err`. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace xol::cli
