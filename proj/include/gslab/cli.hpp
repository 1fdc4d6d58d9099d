#pragma once

#include <string>
#include <vector>

namespace gslab {

/// Command-line front end shared by the binary and in-process tests.
/// Subcommands: solve | sweep | fit | verify | rates.
/// Exit codes: 0 success, 1 verification failure, 2 solver bracket failure,
/// 3 config error, 4 fit degeneracy.
int cli_main(const std::vector<std::string>& args);

} // namespace gslab
