#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ggsep::cli {

enum ExitCode : int {
  kSuccess = 0,
  kInputError = 2,
  kMathError = 3,
  kNotConverged = 4,
};

/// Runs the command line `args` (without the program name). Results go to
/// `out` unless an --out path is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ggsep::cli
