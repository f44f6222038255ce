#pragma once

#include <ostream>

namespace coplan::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kCheckFailed = 1;    // oracle-check found a mismatch
inline constexpr int kUsage = 2;          // bad arguments or config
inline constexpr int kInvariant = 3;      // audit or capacity breach during a campaign
inline constexpr int kRuntime = 4;        // solver or I/O failure

// Subcommands: simulate, compare, report, oracle-check.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace coplan::cli
