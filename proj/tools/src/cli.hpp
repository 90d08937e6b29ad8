#pragma once

#include <ostream>

namespace apla::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kParameterError = 3,
  kOracleMismatch = 4,
};

/// Parses `argv` and runs one command. Human-readable progress goes to
/// `out`, diagnostics to `err`; reports are written under the output directory.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace apla::cli
