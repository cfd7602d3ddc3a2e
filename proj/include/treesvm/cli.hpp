#pragma once

#include <iosfwd>

namespace treesvm {

/// Exit codes of the treesvm command line.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,     ///< bad arguments, unreadable or malformed input
  kExitInternal = 3,  ///< internal failure, or non-convergence under --strict
};

/// Entry point of the `treesvm` tool: train, evaluate, grid, bench, synth.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace treesvm
