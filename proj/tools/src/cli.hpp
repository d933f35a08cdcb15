#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace salvage::cli {

enum ExitCode : int {
  kOk = 0,
  kDominanceViolated = 2,
  kLinkFailed = 3,
  kConfigError = 4,
  kNumericalError = 5,
};

/// Entry point behind salvage-tool. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace salvage::cli
