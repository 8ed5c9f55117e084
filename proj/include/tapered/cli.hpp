#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "tapered/luka.hpp"

namespace tapered::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kInputParse = 2, kMismatch = 3 };

/// Runs one command; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Shortest decimal that reads back to the same binary64.
std::string format_double(double x);

/// "a..b", "a,b,c" or a single norm; every norm must lie in 1..255.
std::vector<int> parse_norms(std::string_view text);

/// Reads the x,y,u,v,status CSV written by `flow`. Lines starting with '#' are skipped.
FlowField<double> parse_flow_csv(std::istream& in);

const char* status_name(FlowStatus s) noexcept;

}  // namespace tapered::cli
