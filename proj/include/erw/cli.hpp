#pragma once
// Command-line entry point.
//
// Subcommands: simulate, rpw, theory, verify-clt, verify-lil,
// verify-chung-smallball, verify-asclt, estimate-xi, sa-check. Each writes
// <out>/report.json and <out>/tables/*.csv (theory prints JSON to stdout).
// Exit codes: 0 when every check passes, 1 on a failed check or runtime
// error, 2 on a bad command line or configuration.

#include <string>
#include <vector>

namespace erw {

int run(int argc, const char* const* argv);

/// Same as above with args[0] taken as the program name.
int run(const std::vector<std::string>& args);

}  // namespace erw
