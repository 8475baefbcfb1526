#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace xhodge::cli {

enum ExitCode : int { kOk = 0, kSolverFailure = 1, kConfigError = 2 };

/// Runs one xhodge command. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace xhodge::cli
