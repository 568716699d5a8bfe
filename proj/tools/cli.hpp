#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace augdist::cli {

enum ExitCode : int { ok = 0, config_error = 2, data_error = 3, feasibility_error = 4 };

/// Runs one command line (args[0] is the program name). Tables go to `out`,
/// diagnostics to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace augdist::cli
