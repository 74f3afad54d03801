#pragma once

#include <iosfwd>

namespace rguard {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNegative = 1;  // gate failed, nothing to refactor, all discarded
inline constexpr int kExitUsage = 2;     // bad flags, config or parse errors

/// Entry point of the `refactor-guard` executable, callable in-process.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Asks a running `serve` command to shut down. Safe to call from a signal
/// handler.
void request_shutdown() noexcept;

}  // namespace rguard
