// Command-line surface: every subcommand prints one JSON report on `out`.
#pragma once

#include <iosfwd>

namespace hcp {

/// Exit codes: 0 success, 1 domain failure (failed attack, rejected login,
/// malformed input file), 2 usage error (help text on `err`).
int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hcp
