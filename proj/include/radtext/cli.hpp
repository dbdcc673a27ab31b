#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace radtext {

/// Runs one `radtext` subcommand. `args` excludes the program name. Returns 0
/// on success, 1 when the command fails, 2 for usage errors such as an unknown
/// subcommand.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace radtext
