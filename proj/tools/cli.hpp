#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tdr::cli {

// Exit codes: 0 success, 1 runtime error, 2 usage error. `args` excludes the
// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tdr::cli
