#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ergodev::cli {

inline constexpr const char* kVersion = "1.0.0";

// Runs the command line `args` (without the program name). CSV goes to `out`
// unless --output is given; diagnostics go to `err`. Returns the exit code:
// 0 success, 2 configuration error, 3 simulation error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Parses a flat "key = value" file into (key, value) pairs; '#' starts a comment line.
std::vector<std::pair<std::string, std::string>> read_flat_config(const std::string& path);

}  // namespace ergodev::cli
