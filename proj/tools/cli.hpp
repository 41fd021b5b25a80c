#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spectral::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInconsistent = 3;

/// Runs one command line (args excludes the program name). Data goes to `out`,
/// diagnostics and progress to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Comma-separated field, quoted when it contains a comma, quote or newline.
std::string csv_field(const std::string& s);

}  // namespace spectral::cli
