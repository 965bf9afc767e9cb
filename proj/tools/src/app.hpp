#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gvpj::cli {

// Parses the command line and runs one subcommand; returns the process exit
// code. Errors are reported on `err`, progress on `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gvpj::cli
