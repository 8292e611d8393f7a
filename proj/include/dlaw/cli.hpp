#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dlaw::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kNumericalFailure = 3 };

/// Runs the command line `args` (without the program name). Binary output
/// goes to `out` when no output path is given; "-" as input reads `in`.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

/// Parses "a:b:step" (inclusive) or "a,b,c".
std::vector<std::size_t> parse_grid(const std::string& text);

}  // namespace dlaw::cli
