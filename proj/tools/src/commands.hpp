#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace egrowth::cli {

enum ExitCode : int { exit_ok = 0, exit_config = 1, exit_solver = 2, exit_check = 3 };

/// Full command line, program name first. Progress goes to `out`,
/// diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace egrowth::cli
