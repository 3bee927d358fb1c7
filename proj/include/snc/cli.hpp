#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace snc::cli {

// Entry point behind the snc binary. `args` excludes the program name.
// Summaries go to `out`, progress and diagnostics to `err`.
// Exit status: 0 = verified or family generated, 1 = counterexample found or
// certificate failure, 2 = usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace snc::cli
