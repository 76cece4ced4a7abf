#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hyperbeta::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kArgumentError = 2;
inline constexpr int kNumericalError = 3;
inline constexpr int kIoError = 4;

/// Runs one CLI invocation. args excludes the program name. Data goes to
/// `out` when no output file is given; diagnostics go to `err`, and every
/// failure prints exactly one line `error: <kind>: <message>`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hyperbeta::cli
