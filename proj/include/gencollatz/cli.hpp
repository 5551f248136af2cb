#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gencollatz::cli {

// Dispatches one command line. Exit statuses: 0 success, 1 usage or parameter
// error, 2 a scan run with --fail-on-counterexample found a non-principal
// cycle, 3 I/O failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv);

}  // namespace gencollatz::cli
