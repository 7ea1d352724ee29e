#ifndef PCT_CLI_COMMANDS_H_
#define PCT_CLI_COMMANDS_H_

#include <filesystem>
#include <ostream>

#include "absl/status/statusor.h"
#include "pct/cli/config.h"

namespace pct {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitPartial = 2;

// Parses argv (config file first, then flags), validates and dispatches.
// Thread count comes from PCT_THREADS when set.
int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Runs a validated config. Log lines go to `log`.
int RunCommand(const RunConfig& config, std::ostream& log, std::ostream& err);

// out/<subcommand>/<UTC timestamp>-<config hash>, or config.run_dir.
std::filesystem::path RunDirectory(const RunConfig& config);

}  // namespace pct

#endif  // PCT_CLI_COMMANDS_H_
