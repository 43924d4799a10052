#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dcpx {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInaccurate = 3;

// Entry point behind the `dcpx` binary. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dcpx
