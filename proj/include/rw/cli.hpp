#pragma once

#include <ostream>

namespace rw {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitParse = 2,
  kExitValidation = 3,
  kExitAssert = 4,
  kExitDivergence = 5,
};

// Entry point of the `rw` tool: check, run, tree and bench subcommands.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rw
