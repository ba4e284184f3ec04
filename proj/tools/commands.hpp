#pragma once

#include "run_config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace wrisk::app {

// Each command writes its files under config.out_dir, lists them on `log`
// and throws wrisk::Error subclasses on failure. Nothing is written unless
// every output was computed.

/// control_daily.csv, control_weekly.csv and scenario_<label>_daily.csv.
void cmd_synth(const RunConfig& config, std::ostream& log);

/// two_stage_model.txt, fit_report.txt and, for GA-SVR,
/// ga_history_claims.csv / ga_history_loss.csv.
void cmd_fit(const RunConfig& config, std::ostream& log);

/// comparison.csv (+ fitted_claims.svg, fitted_loss.svg). Returns the exit
/// code: 0 when at least one model fitted, 3 otherwise.
int cmd_compare(const RunConfig& config, std::ostream& log);

/// projection.csv and projected_series.csv (+ projection_claims.svg,
/// projection_loss.svg). Sub-period warnings go to `warn`.
void cmd_project(const RunConfig& config, std::ostream& log, std::ostream& warn);

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name. Exit codes: 0 ok, 1 config, 2 data, 3 fit, 4 model version.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace wrisk::app
