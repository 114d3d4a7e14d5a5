#pragma once

#include <exception>
#include <ostream>

namespace anomattr::cli {

// Entry point shared by the executable and the tests. Returns the process
// exit code: 0 ok, 2 usage, 3 data, 4 model protocol, 5 non-convergence.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int exit_code_for(const std::exception& e);

}  // namespace anomattr::cli
