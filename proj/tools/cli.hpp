#pragma once

#include <ostream>

namespace swstab::cli {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;     // I/O, parse or validation failure
inline constexpr int kExitDiverged = 2;  // also: certify failed, compare found nothing
inline constexpr int kExitMaxIters = 3;

/// Runs one command line (argv[0] is the program name). Regular output goes
/// to `out`, diagnostics to `err`; nothing is written to the process streams
/// directly, so this is callable in-process from tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace swstab::cli
