#pragma once

#include "wrisk/data_ingest.hpp"
#include "wrisk/risk_pipeline.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wrisk {

/// sqrt(mean((predicted - observed)^2)). Throws std::invalid_argument on
/// empty or mismatched input.
double rmse(std::span<const double> predicted, std::span<const double> observed);

/// Population standard deviation.
double standard_deviation(std::span<const double> values);

/// Fraction of the top-decile observed weeks (ceil(n/10) of them) whose
/// fitted value is also in the fitted top decile. Ties rank by week order.
double peak_capture(std::span<const double> observed, std::span<const double> fitted);

struct FittedSeries {
    std::vector<Date> weeks;
    std::vector<double> observed_claims;
    std::vector<double> fitted_claims;
    std::vector<double> observed_loss;
    std::vector<double> fitted_loss;
    double peak_capture_claims = 0.0;
    double peak_capture_loss = 0.0;
};

/// In-sample fits of both stages. The loss stage uses the observed claims,
/// exactly as during training.
FittedSeries fitted_series(const TwoStageModel& model, const WeeklySeries& control);

struct ComparisonRow {
    ModelKind kind = ModelKind::Svr;
    std::optional<double> rmse_claims;
    std::optional<double> rmse_loss;
    std::optional<double> peak_capture_claims;
    std::string error; // set when the model failed to fit

    bool ok() const noexcept { return error.empty(); }
};

struct Comparison {
    std::vector<ComparisonRow> rows; // ANN, SVR, GA-SVR
    std::vector<std::optional<FittedSeries>> fitted;
};

/// Fits the ANN, fixed SVR and GA-SVR two-stage models on the same features
/// and reports training RMSE per stage. A failing model yields a flagged row.
Comparison compare_models(const WeeklySeries& control, const TwoStageConfig& config);

/// `model,rmse_claims,rmse_loss,peak_capture_claims`; failed cells read `NA`.
void write_comparison_csv(std::ostream& out, const Comparison& comparison);

} // namespace wrisk
