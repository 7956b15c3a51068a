#pragma once

#include <iosfwd>
#include <memory>

#include "run_config.hpp"

namespace ionloss
{
class IonizationTable;
}

namespace ionloss::cli
{
//! Azimuth for the one-off phi-invariance check, drawn from mt19937_64.
double phi_check_angle(std::uint64_t seed);

std::shared_ptr<IonizationTable const> build_table(RunConfig const& cfg);

// Each command writes its CSV (or report) to `out` and diagnostics to `log`.
// Errors propagate as ConfigError / LoadError / ConvergenceError.
void cmd_scan_theta(RunConfig const& cfg, std::ostream& out, std::ostream& log);
void cmd_average(RunConfig const& cfg, std::ostream& out, std::ostream& log);
void cmd_table(RunConfig const& cfg, std::ostream& out, std::ostream& log);
void cmd_validate(RunConfig const& cfg, std::ostream& out, std::ostream& log);
}  // namespace ionloss::cli
