#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kum::cli {

enum ExitCode : int { kOk = 0, kFail = 1, kUsage = 2, kBreach = 3 };

// Runs one kumctl command line (args excludes the program name).
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kum::cli
