#pragma once

#include <iosfwd>

namespace amn {

/// Entry point of the `amn` command-line tool. Parses argv, dispatches to the
/// requested subcommand, and writes results to the given streams (tests pass
/// string streams; the binary passes std::cout / std::cerr).
///
/// Exit codes: 0 success, 1 findings (diagnostics, a non-canonical file under
/// `fmt --check`, conformance violations), 2 usage or file-access errors,
/// 3 runtime failures (a simulation or classification that could not run).
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// The tool's semantic version string.
const char* cli_version();

} // namespace amn
