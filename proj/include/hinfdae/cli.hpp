#pragma once

#include <iosfwd>

#include "hinfdae/error.hpp"

namespace hinfdae::cli {

/// Exit codes: 0 success, 1 usage, 2 validation, 3 infeasible, 4 numerical.
int exit_code(ErrorKind kind);

/// Parses argv and runs one sub-command. Results go to files in --out and a
/// short summary to `out`; failures print one "error[<kind>]: <reason>" line
/// to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hinfdae::cli
