#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qubus {

/// Runs the command line (without the program name). Returns the exit status:
/// 0 on success, 1 for usage errors, 2 for validation or parse errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qubus
