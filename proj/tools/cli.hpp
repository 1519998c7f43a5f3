#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ising::cli {

// Exit codes.
inline constexpr int kPass = 0;
inline constexpr int kUsage = 1;
inline constexpr int kAssertionFailed = 2;
inline constexpr int kRegime = 3;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ising::cli
