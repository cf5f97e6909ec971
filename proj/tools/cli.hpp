#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace grm3d::cli {

enum ExitCode { kOk = 0, kOperational = 1, kUsage = 2 };

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace grm3d::cli
