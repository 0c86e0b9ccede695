#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace absa {

// Entry point of the `absa` tool. `args[0]` is the program name. Returns 0
// on success, 1 on a runtime failure, 2 on a usage error.
int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err);

}  // namespace absa
