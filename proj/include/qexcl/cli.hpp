#pragma once

#include <ostream>

namespace qexcl {

/// Entry point of the command-line tool. Exit codes: 0 success, 1 verification
/// failures, 2 usage or input errors (message on `err`).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

}  // namespace qexcl
