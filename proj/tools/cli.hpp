#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dyngame::cli {

enum ExitCode { kHolds = 0, kFails = 1, kInconclusive = 2, kInputError = 3 };

// Runs one subcommand. The JSON report goes to out, diagnostics to err.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dyngame::cli
