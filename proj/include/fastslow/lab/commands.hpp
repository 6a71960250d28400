#pragma once

#include <iosfwd>

#include "fastslow/lab/config.hpp"

namespace fastslow::lab {

enum ExitCode : int { kPass = 0, kThresholdFailure = 1, kConfigError = 2, kNumericalFailure = 3 };

// Each command writes its files and manifest-<command>.json into cfg.output_directory,
// prints a summary to `out`, and returns an ExitCode. ConfigError and NumericalError
// propagate to the caller.
int cmd_simulate(const RunConfig& cfg, std::ostream& out);
int cmd_sweep(const RunConfig& cfg, std::ostream& out);
int cmd_thermo(const RunConfig& cfg, std::ostream& out);
int cmd_twoscale(const RunConfig& cfg, std::ostream& out);
int cmd_check(const RunConfig& cfg, std::ostream& out);

}  // namespace fastslow::lab
