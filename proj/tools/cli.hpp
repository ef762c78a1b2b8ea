#pragma once

#include <string>
#include <vector>

namespace orthant::cli {

enum ExitCode { kOk = 0, kAssumptionFailure = 1, kHardError = 2 };

// Entry point shared by the executable and the CLI tests. args excludes the
// program name.
int run(const std::vector<std::string>& args);

}  // namespace orthant::cli
