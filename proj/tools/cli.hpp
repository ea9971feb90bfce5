#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sketchdist::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kIoOrParseError = 1;
inline constexpr int kValidationFailure = 2;
inline constexpr int kShapeOrFormatMismatch = 3;

/// Runs one subcommand. `args` excludes the program name. Reports go to `out`,
/// diagnostics and machine-readable error JSON to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sketchdist::cli
