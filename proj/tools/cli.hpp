#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mtctrl::cli {

enum ExitCode : int { Ok = 0, InputError = 1, Stalled = 2, SelfTestFailure = 3 };

/// Runs one command line (args excludes the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mtctrl::cli
