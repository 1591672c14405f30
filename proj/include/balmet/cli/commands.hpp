#pragma once

#include <iosfwd>

#include "balmet/cli/config.hpp"

namespace balmet {

// Exit codes shared by all subcommands:
//   0  success
//   1  invalid input (bad flags, malformed files, missing fixed point)
//   2  iteration hit max-steps without reaching tolerance
//   3  numerical failure (non-positive products, singular Gram, underflow)
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitMaxSteps = 2;
inline constexpr int kExitNumerical = 3;

int cmd_iterate(const RunConfig& c, std::ostream& out, std::ostream& err);
int cmd_gap(const RunConfig& c, std::ostream& out, std::ostream& err);
int cmd_flow(const RunConfig& c, std::ostream& out, std::ostream& err);
int cmd_linearize(const RunConfig& c, std::ostream& out, std::ostream& err);
int cmd_rawnsley(const RunConfig& c, std::ostream& out, std::ostream& err);

// Dispatch on c.command; catches the library exception types and converts
// them to exit codes + a one-line message on err.
int run_command(const RunConfig& c, std::ostream& out, std::ostream& err);

}  // namespace balmet
