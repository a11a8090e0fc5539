#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace switchkit::cli {

enum ExitCode : int {
    kOk = 0,
    kValidationFailure = 1,
    kNumericFailure = 2,
    kUsage = 64,
};

/**
 * Run one CLI invocation. args excludes the program name. The JSON summary
 * goes to `out`, usage text and diagnostics to `err`.
 */
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace switchkit::cli
