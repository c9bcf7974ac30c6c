#pragma once

#include <ostream>

#include "chs/cli/config.hpp"

namespace chs::cli {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3, kExitRegime = 4 };

// Each command writes its files under cfg.output.dir and a short summary to
// `out`; diagnostics go to `err`. Returns the process exit code.
int cmd_constants(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_rates(const RunConfig& cfg, bool synthetic, std::ostream& out, std::ostream& err);
int cmd_threshold(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_selftest(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace chs::cli
