#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gcmvs::cli {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitMissingInput = 2, kExitCompute = 3 };

/// Environment variable holding the default for --threads.
inline constexpr const char* kThreadsEnv = "GCMVS_THREADS";

/// Runs one subcommand. `args` excludes the program name. Reports go to
/// `out`, diagnostics and usage text to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace gcmvs::cli
