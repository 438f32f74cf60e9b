#pragma once

#include <ostream>

namespace qecomb::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kScorerFailure = 3,
  kIoError = 4,
};

// Entry point shared by the qecomb binary and the tests. Normal output
// goes to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qecomb::cli
