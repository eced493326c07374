#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace linat {

// Runs one command-line invocation. `args` excludes the program name.
// Returns the process exit code: 0 success, 1 invalid input or refused
// request, 2 partial result (a size cap or search budget was hit), 3
// internal invariant failure.
//
// Reports never include timing or host-specific data, so repeated runs on
// the same inputs produce byte-identical output.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace linat
