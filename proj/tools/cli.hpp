#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bec::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_invalid = 1;
inline constexpr int exit_compute = 2;

/// Runs one command line (args excludes the program name). Results go to
/// `out`, diagnostics to `err`; returns the process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace bec::cli
