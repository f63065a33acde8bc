#pragma once

#include <iosfwd>

namespace wqed::cli {

/// Exit codes: 0 success, 1 validation, 2 numerical failure, 3 I/O.
enum ExitCode : int { kOk = 0, kValidation = 1, kNumerical = 2, kIo = 3 };

/// Parses argv, runs one subcommand and writes its files. Diagnostics go to
/// `err`; help and version text to `out`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wqed::cli
