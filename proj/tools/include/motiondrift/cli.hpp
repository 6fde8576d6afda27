#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace motiondrift::cli {

/// Exit status contract of the command-line tool.
enum ExitCode : int { kOk = 0, kConfigError = 1, kDataError = 2, kNumericalError = 3 };

/// Runs `motiondrift <args...>` in-process (args exclude the program name).
/// Standard input is only read by `monitor`.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace motiondrift::cli
