#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace roughlift::cli {

enum ExitCode : int { kPass = 0, kInvariantFailure = 1, kConfigError = 2, kIoError = 3 };

/// Runs one command; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace roughlift::cli
