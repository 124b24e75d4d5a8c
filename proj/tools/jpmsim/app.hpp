#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace jpmsim::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kNumericalError = 3,
  kIoError = 4,
};

/// Subcommand names in the order they appear in --help.
const std::vector<std::string_view>& subcommand_names();

/// Runs the tool with argv[1..] in `args`. Summaries go to `out`, errors to
/// `err`. Never throws; the return value is the process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace jpmsim::cli
