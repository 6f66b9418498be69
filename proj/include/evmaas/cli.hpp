#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace evmaas {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitInfeasible = 2, kExitSolver = 3 };

/// Entry point of the `evmaas` tool. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

}  // namespace evmaas
