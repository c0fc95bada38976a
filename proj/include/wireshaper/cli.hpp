// Command-line entry point, exposed as a function so tests can drive it
// in-process. Exit codes: 0 success, 2 usage/validation error, 3 simulation
// fault.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wireshaper {

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wireshaper
