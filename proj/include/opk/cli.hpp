#pragma once

#include <iosfwd>

namespace opk {

inline constexpr const char* kToolVersion = "1.0.0";

// Runs one opk subcommand. Returns 0 on success, 2 for invalid input, 3 for
// numerical breakdown; errors are written to err as a JSON object.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace opk
