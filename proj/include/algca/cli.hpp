#pragma once

// Command-line driver. Exit codes: 0 success, 1 a checked property failed
// (witness printed), 2 usage or spec error.

#include <iosfwd>
#include <string>
#include <vector>

namespace algca {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace algca
