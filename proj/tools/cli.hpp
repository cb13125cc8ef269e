#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "jsnlm/verify.hpp"

namespace jsnlm::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsage = 2, kIo = 3 };

/// Entry point shared by main() and the tests. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Runs the oracle suite and prints one line per check.
int verify(const VerifyOptions& options, std::ostream& out, std::ostream& err);

}  // namespace jsnlm::cli
