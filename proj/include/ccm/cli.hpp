#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ccm::cli {

/// Process exit codes.
enum ExitCode : int {
    kOk = 0,
    kAssertionFailed = 1,
    kParseError = 2,  // malformed input text or command line
    kInvalid = 3,     // validation, usage or evaluation error
};

/// Runs one `ccm` invocation. `args` excludes the program name. Commands:
/// eval, solutions, rewrite, axioms, validity, combine, repl.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace ccm::cli
