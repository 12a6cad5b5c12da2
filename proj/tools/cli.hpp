#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sphens::cli {

/// Exit codes: 0 success, 1 runtime failure, 2 usage or domain error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Runs the command line. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Quantity names accepted by `exact`.
std::vector<std::string> exact_quantity_names();

}  // namespace sphens::cli
