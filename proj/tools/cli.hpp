#pragma once

#include <iosfwd>

namespace causalfair::cli {

// Process exit codes shared by every subcommand.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kInputError = 2,
  kUnknownNode = 3,
  kMissingRole = 4,
  kTheoremViolation = 5,
};

// Runs the `causalfair` command line. Results go to `out` unless an
// --output path is given; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace causalfair::cli
