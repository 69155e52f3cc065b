#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rmerton {

// Runs one CLI command. Exit code 0 on success, 1 on usage or validation
// errors, 2 when a verification check ran fine but failed its math check.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rmerton
