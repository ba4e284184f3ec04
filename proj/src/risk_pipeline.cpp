#include "wrisk/risk_pipeline.hpp"

#include "wrisk/error.hpp"
#include "wrisk/metrics.hpp"
#include "wrisk/text_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <ostream>

namespace wrisk {
namespace {

struct FittedStage {
    Regressor model;
    StageProvenance provenance;
};

FittedStage fit_stage(const FeatureSet& data, const TwoStageConfig& config, std::uint64_t seed_offset) {
    FittedStage out{SvrModel{}, {}};
    switch (config.kind) {
    case ModelKind::GaSvr: {
        GaConfig ga = config.ga;
        ga.solver = config.solver; // GA fitness and the refit must see the same solver
        ga.seed += seed_offset;
        GaResult result = ga_run(data.X, data.y, ga);
        out.model = svr_fit(data.X, data.y, result.best_hyperparams, config.solver);
        out.provenance.hyperparams = result.best_hyperparams;
        out.provenance.evaluations = result.evaluations;
        out.provenance.ga = std::move(result);
        break;
    }
    case ModelKind::Svr:
        out.model = svr_fit(data.X, data.y, config.svr, config.solver);
        out.provenance.hyperparams = config.svr;
        break;
    case ModelKind::Ann: {
        AnnTrainConfig ann = config.ann;
        ann.seed += seed_offset;
        out.model = ann_train(data.X, data.y, config.ann_hidden, ann).model;
        break;
    }
    }
    out.provenance.training_rmse = rmse(predict(out.model, data.X), data.y);
    return out;
}

std::vector<double> clamp_nonnegative(std::vector<double> values) {
    for (auto& v : values) {
        v = std::max(0.0, v);
    }
    return values;
}

} // namespace

std::string_view to_string(ModelKind kind) {
    switch (kind) {
    case ModelKind::GaSvr:
        return "GA-SVR";
    case ModelKind::Svr:
        return "SVR";
    case ModelKind::Ann:
        return "ANN";
    }
    return "?";
}

ModelKind parse_model_kind(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "ga-svr" || lower == "gasvr") {
        return ModelKind::GaSvr;
    }
    if (lower == "svr") {
        return ModelKind::Svr;
    }
    if (lower == "ann") {
        return ModelKind::Ann;
    }
    throw ConfigError("unknown model kind '" + std::string(text) + "' (expected ga-svr, svr or ann)");
}

double predict(const Regressor& model, std::span<const double> x) {
    return std::visit(
        [&](const auto& m) {
            if constexpr (std::is_same_v<std::decay_t<decltype(m)>, SvrModel>) {
                return svr_predict(m, x);
            } else {
                return ann_forward(m, x);
            }
        },
        model);
}

std::vector<double> predict(const Regressor& model, const Matrix& X) {
    std::vector<double> out(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        out[i] = predict(model, X.row(i));
    }
    return out;
}

std::size_t input_dimension(const Regressor& model) {
    return std::visit([](const auto& m) { return m.dimension(); }, model);
}

TwoStageModel fit_two_stage(const WeeklySeries& control, const TwoStageConfig& config) {
    const FeatureSet claims = build_claims_features(control);
    const FeatureSet loss = build_loss_features(control, claims.y);

    TwoStageModel model;
    model.kind = config.kind;
    auto stage1 = fit_stage(claims, config, 0);
    auto stage2 = fit_stage(loss, config, 1);
    model.claims_model = std::move(stage1.model);
    model.claims_provenance = std::move(stage1.provenance);
    model.loss_model = std::move(stage2.model);
    model.loss_provenance = std::move(stage2.provenance);

    ControlSummary& summary = model.control;
    for (double v : claims.y) {
        summary.claims_sum += v;
    }
    for (double v : loss.y) {
        summary.loss_sum += v;
    }
    summary.weeks = claims.week_index.size();
    summary.first_year = iso_week_year(control.records[claims.week_index.front()].week_start);
    summary.last_year = iso_week_year(control.records[claims.week_index.back()].week_start);
    return model;
}

Projection project(const TwoStageModel& model, const WeeklySeries& scenario) {
    const FeatureSet claims_features = build_claims_features(scenario, false);
    Projection out;
    for (std::size_t idx : claims_features.week_index) {
        out.weeks.push_back(scenario.records[idx].week_start);
    }
    out.claims = clamp_nonnegative(predict(model.claims_model, claims_features.X));
    const FeatureSet loss_features = build_loss_features(scenario, out.claims, false);
    out.loss = clamp_nonnegative(predict(model.loss_model, loss_features.X));
    return out;
}

std::vector<SubPeriod> split_subperiods(int first_year, int last_year, int length_years) {
    if (length_years < 1) {
        throw DataError("sub-period length must be at least one year");
    }
    if (last_year < first_year) {
        throw DataError("empty scenario year range");
    }
    const int span = last_year - first_year + 1;
    if (span % length_years != 0) {
        throw DataError("span not divisible: " + std::to_string(first_year) + "-" + std::to_string(last_year) +
                        " (" + std::to_string(span) + " years) into " + std::to_string(length_years) +
                        "-year sub-periods");
    }
    std::vector<SubPeriod> out;
    for (int start = first_year; start <= last_year; start += length_years) {
        const int end = start + length_years - 1;
        out.push_back({std::to_string(start) + "-" + std::to_string(end), start, end});
    }
    return out;
}

double delta(double scenario_sum, double control_sum) {
    if (!(control_sum > 0.0)) {
        throw DataError("control sum must be positive");
    }
    return (scenario_sum / control_sum - 1.0) * 100.0;
}

std::vector<ProjectionResult> project_report(const TwoStageModel& model,
                                             const std::vector<WeeklySeries>& scenarios,
                                             const ProjectionOptions& options) {
    std::vector<ProjectionResult> results;
    for (const auto& scenario : scenarios) {
        ProjectionResult result;
        result.scenario = scenario.label;
        result.control_weeks = model.control.weeks;
        result.series = project(model, scenario);

        std::vector<int> years;
        for (Date d : result.series.weeks) {
            years.push_back(iso_week_year(d));
        }
        const int first = options.first_year.value_or(*std::min_element(years.begin(), years.end()));
        const int last = options.last_year.value_or(*std::max_element(years.begin(), years.end()));
        for (const auto& period : split_subperiods(first, last, model.control.years())) {
            SubPeriodResult r;
            r.period = period;
            double claims = 0.0;
            double loss = 0.0;
            for (std::size_t t = 0; t < years.size(); ++t) {
                if (years[t] >= period.start_year && years[t] <= period.end_year) {
                    claims += result.series.claims[t];
                    loss += result.series.loss[t];
                    ++r.weeks;
                }
            }
            r.delta_claims = delta(claims, model.control.claims_sum);
            r.delta_loss = delta(loss, model.control.loss_sum);
            const auto gap = r.weeks > model.control.weeks ? r.weeks - model.control.weeks
                                                           : model.control.weeks - r.weeks;
            if (gap > 1) {
                result.warnings.push_back(scenario.label + " " + period.label + ": " + std::to_string(r.weeks) +
                                          " weeks vs " + std::to_string(model.control.weeks) + " in control");
            }
            result.periods.push_back(r);
        }
        results.push_back(std::move(result));
    }
    return results;
}

void write_projection_csv(std::ostream& out, const std::vector<ProjectionResult>& results) {
    out << "scenario,subperiod,delta_claims_pct,delta_loss_pct,weeks_scn,weeks_ctr\n";
    for (const auto& r : results) {
        for (const auto& p : r.periods) {
            out << r.scenario << ',' << p.period.label << ',' << format_double(p.delta_claims) << ','
                << format_double(p.delta_loss) << ',' << p.weeks << ',' << r.control_weeks << '\n';
        }
    }
}

void write_projected_series_csv(std::ostream& out, const std::vector<ProjectionResult>& results) {
    out << "scenario,week_start,N_hat,L_hat\n";
    for (const auto& r : results) {
        for (std::size_t t = 0; t < r.series.weeks.size(); ++t) {
            out << r.scenario << ',' << format_date(r.series.weeks[t]) << ',' << format_double(r.series.claims[t])
                << ',' << format_double(r.series.loss[t]) << '\n';
        }
    }
}

} // namespace wrisk
