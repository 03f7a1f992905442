#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace estkit::cli {

// Exit codes.
inline constexpr int exit_ok = 0;
inline constexpr int exit_invalid = 1;  // bad spec, parameters, usage, capability
inline constexpr int exit_data = 2;     // unreadable data or archive, shape mismatch
inline constexpr int exit_fit = 3;      // learning failed

// Runs one command line (without the program name). Messages go to `out`
// and `err`; files are written as requested by the flags.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace estkit::cli
