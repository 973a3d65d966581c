#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace thermoctl::cli {

enum ExitCode : int {
    kOk = 0,
    kConfigError = 2,
    kScopeError = 3,
    kNumericalFailure = 4,
};

// Runs one command line (without the program name). Reports go to their
// --output file or to `out`; the single-line error record goes to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace thermoctl::cli
