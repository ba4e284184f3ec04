#pragma once

#include "wrisk/metrics.hpp"
#include "wrisk/risk_pipeline.hpp"

#include <string>

namespace wrisk::app {

/// Grouped bars of the percentage change per sub-period, one colour per
/// scenario. `loss` selects the loss column instead of claims.
std::string projection_svg(const std::vector<ProjectionResult>& results, bool loss);

/// Observed series with the fitted series of every model that succeeded.
std::string fitted_svg(const Comparison& comparison, bool loss);

} // namespace wrisk::app
