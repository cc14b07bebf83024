#pragma once

#include <string>
#include <vector>

namespace lexqa::cli {

/// Exit codes: 0 success, 2 input error, 3 data-consistency error, 4 internal invariant violation.
enum ExitCode : int { kOk = 0, kInputError = 2, kDataError = 3, kInternalError = 4 };

/// Runs the command line `lexqa <args...>`; args exclude the program name.
int run_cli(const std::vector<std::string>& args);

}  // namespace lexqa::cli
