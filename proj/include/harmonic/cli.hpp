#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace harmonic::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailedCheck = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIncomplete = 3;

/// Runs one subcommand. `args` excludes the program name. Exit codes:
/// 0 success, 1 a `verify` check failed, 2 invalid input or usage,
/// 3 solver did not converge or walks were truncated (artifacts still
/// written and flagged).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace harmonic::cli
