#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ceo {

/// Runs one CLI invocation (args exclude the program name) against the given
/// streams. Exit codes: 0 success, 2 input/validation error, 3 convergence
/// or verification failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace ceo
