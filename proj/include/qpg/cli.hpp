#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qpg::cli {

// Subcommands: train | bin-sweep | theorems | report.
// Exit codes: 0 success, 1 theorem violations, 2 usage/config/IO errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qpg::cli
