#pragma once

#include <iosfwd>

namespace nlgrav::cli {

/// Entry point of the command-line tool. Returns the process exit code:
/// 0 on success, 2 for invalid input, 3 for numerical failure or an
/// acceptance band that was not met.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nlgrav::cli
