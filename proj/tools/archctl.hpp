#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace arsip::cli {

/// Exit codes: 0 success, 1 runtime failure, 2 usage error. Every failure
/// prints exactly one line to `err`, prefixed "error: <code>: ".
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs archctl with argv-style arguments (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace arsip::cli
