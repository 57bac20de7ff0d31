#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cshd::cli {

enum ExitCode : int {
  kSuccess = 0,
  kInputError = 2,
  kBoundInapplicable = 3,
  kReproductionFailure = 4,
};

/// Runs the command line `args` (without the program name). Output that
/// --out does not redirect goes to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cshd::cli
