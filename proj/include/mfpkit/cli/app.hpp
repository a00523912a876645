#pragma once

#include <ostream>

#include "mfpkit/error.hpp"

namespace mfpkit::cli {

inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumerical = 4;

int exit_code(ErrorCategory category);

/// Parses the command line, runs one subcommand and writes report.txt and
/// report.json to the output directory. The text report is also printed to
/// `out`; diagnostics go to `err`. Returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mfpkit::cli
