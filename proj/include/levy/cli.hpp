#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace levy::cli {

inline constexpr const char* kToolVersion = "0.3.0";

/// Runs one subcommand. `args` excludes the program name.
/// Exit codes: 0 success, 1 a hard check failed, 2 bad configuration.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

/// "a:b" (every decade from a to b), "a:b:n" (n log-spaced points) or a
/// comma-separated list.
std::vector<double> parse_t_grid(const std::string& text);
std::vector<double> parse_list(const std::string& text);

}  // namespace levy::cli
