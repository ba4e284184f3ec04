#include "wrisk/metrics.hpp"

#include "wrisk/error.hpp"
#include "wrisk/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace wrisk {
namespace {

std::vector<std::size_t> top_indices(std::span<const double> values, std::size_t k) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    order.resize(k);
    std::sort(order.begin(), order.end());
    return order;
}

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : "NA"; }

} // namespace

double rmse(std::span<const double> predicted, std::span<const double> observed) {
    if (predicted.size() != observed.size()) {
        throw std::invalid_argument("rmse: length mismatch");
    }
    if (predicted.empty()) {
        throw std::invalid_argument("rmse: empty input");
    }
    double ss = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const double r = predicted[i] - observed[i];
        ss += r * r;
    }
    return std::sqrt(ss / static_cast<double>(predicted.size()));
}

double standard_deviation(std::span<const double> values) {
    if (values.empty()) {
        throw std::invalid_argument("standard_deviation: empty input");
    }
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) {
        ss += (v - mean) * (v - mean);
    }
    return std::sqrt(ss / static_cast<double>(values.size()));
}

double peak_capture(std::span<const double> observed, std::span<const double> fitted) {
    if (observed.size() != fitted.size() || observed.empty()) {
        throw std::invalid_argument("peak_capture: need equal, non-empty inputs");
    }
    const std::size_t k = (observed.size() + 9) / 10;
    const auto a = top_indices(observed, k);
    const auto b = top_indices(fitted, k);
    std::vector<std::size_t> both;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
    return static_cast<double>(both.size()) / static_cast<double>(k);
}

FittedSeries fitted_series(const TwoStageModel& model, const WeeklySeries& control) {
    const FeatureSet claims = build_claims_features(control);
    const FeatureSet loss = build_loss_features(control, claims.y);
    FittedSeries out;
    for (std::size_t idx : claims.week_index) {
        out.weeks.push_back(control.records[idx].week_start);
    }
    out.observed_claims = claims.y;
    out.fitted_claims = predict(model.claims_model, claims.X);
    out.observed_loss = loss.y;
    out.fitted_loss = predict(model.loss_model, loss.X);
    out.peak_capture_claims = peak_capture(out.observed_claims, out.fitted_claims);
    out.peak_capture_loss = peak_capture(out.observed_loss, out.fitted_loss);
    return out;
}

Comparison compare_models(const WeeklySeries& control, const TwoStageConfig& config) {
    // Feature construction errors concern the data, not a model: let them out.
    (void)build_loss_features(control, build_claims_features(control).y);

    Comparison out;
    for (ModelKind kind : {ModelKind::Ann, ModelKind::Svr, ModelKind::GaSvr}) {
        ComparisonRow row;
        row.kind = kind;
        TwoStageConfig cfg = config;
        cfg.kind = kind;
        try {
            const TwoStageModel model = fit_two_stage(control, cfg);
            FittedSeries fitted = fitted_series(model, control);
            row.rmse_claims = rmse(fitted.fitted_claims, fitted.observed_claims);
            row.rmse_loss = rmse(fitted.fitted_loss, fitted.observed_loss);
            row.peak_capture_claims = fitted.peak_capture_claims;
            out.fitted.emplace_back(std::move(fitted));
        } catch (const FitError& e) {
            row.error = e.what();
            out.fitted.emplace_back(std::nullopt);
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

void write_comparison_csv(std::ostream& out, const Comparison& comparison) {
    out << "model,rmse_claims,rmse_loss,peak_capture_claims\n";
    for (const auto& row : comparison.rows) {
        out << to_string(row.kind) << ',' << cell(row.rmse_claims) << ',' << cell(row.rmse_loss) << ','
            << cell(row.peak_capture_claims) << '\n';
    }
}

} // namespace wrisk
