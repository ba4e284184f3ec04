#pragma once

#include "wrisk/ann.hpp"
#include "wrisk/data_ingest.hpp"
#include "wrisk/ga_tuner.hpp"
#include "wrisk/svr.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace wrisk {

enum class ModelKind { GaSvr, Svr, Ann };

std::string_view to_string(ModelKind kind);
/// Accepts "ga-svr", "svr" and "ann" (case-insensitive). Throws ConfigError.
ModelKind parse_model_kind(std::string_view text);

using Regressor = std::variant<SvrModel, AnnModel>;

double predict(const Regressor& model, std::span<const double> x);
std::vector<double> predict(const Regressor& model, const Matrix& X);
std::size_t input_dimension(const Regressor& model);

struct TwoStageConfig {
    ModelKind kind = ModelKind::GaSvr;
    GaConfig ga;                                     // GA-SVR
    SvrHyperparams svr = default_svr_hyperparams();  // fixed-hyperparameter SVR
    SvrSolverOptions solver;                         // SVR and the final GA-SVR refit
    AnnTrainConfig ann;
    std::size_t ann_hidden = 2;
};

/// How one stage was tuned. For fixed hyperparameters and the ANN the GA is
/// bypassed and `evaluations` is zero.
struct StageProvenance {
    std::optional<SvrHyperparams> hyperparams;
    std::optional<GaResult> ga;
    std::size_t evaluations = 0;
    double training_rmse = 0.0;
};

/// Observed totals over the weeks used for fitting (rows with a lag).
struct ControlSummary {
    double claims_sum = 0.0;
    double loss_sum = 0.0;
    std::size_t weeks = 0;
    int first_year = 0;
    int last_year = 0;

    int years() const noexcept { return last_year - first_year + 1; }
};

struct TwoStageModel {
    ModelKind kind = ModelKind::GaSvr;
    Regressor claims_model;
    Regressor loss_model;
    StageProvenance claims_provenance;
    StageProvenance loss_provenance;
    ControlSummary control;
};

/// Stage 1 fits N_t on (R_t, R_{t-1}, maxR_t); stage 2 fits L_t on the same
/// features plus the observed N_t.
TwoStageModel fit_two_stage(const WeeklySeries& control, const TwoStageConfig& config);

struct Projection {
    std::vector<Date> weeks;
    std::vector<double> claims; // clamped at 0
    std::vector<double> loss;   // clamped at 0, from the clamped claims
};

/// Predicts claims from precipitation, then losses with the predicted
/// claims as the fourth feature.
Projection project(const TwoStageModel& model, const WeeklySeries& scenario);

struct SubPeriod {
    std::string label; // "2021-2030"
    int start_year = 0;
    int end_year = 0;

    friend bool operator==(const SubPeriod&, const SubPeriod&) = default;
};

/// Contiguous, equal-length sub-periods covering [first_year, last_year].
/// Throws DataError when the span is not a multiple of `length_years`.
std::vector<SubPeriod> split_subperiods(int first_year, int last_year, int length_years);

/// (scenario_sum / control_sum - 1) * 100. Throws DataError when
/// control_sum <= 0.
double delta(double scenario_sum, double control_sum);

struct SubPeriodResult {
    SubPeriod period;
    double delta_claims = 0.0;
    double delta_loss = 0.0;
    std::size_t weeks = 0;
};

struct ProjectionResult {
    std::string scenario;
    std::vector<SubPeriodResult> periods;
    std::size_t control_weeks = 0;
    Projection series;
    std::vector<std::string> warnings; // week counts differing by more than one
};

struct ProjectionOptions {
    /// Scenario years to analyse; derived from the ISO week-years of the
    /// scenario when unset. Weeks outside the range are ignored.
    std::optional<int> first_year;
    std::optional<int> last_year;
};

std::vector<ProjectionResult> project_report(const TwoStageModel& model,
                                             const std::vector<WeeklySeries>& scenarios,
                                             const ProjectionOptions& options = {});

/// `scenario,subperiod,delta_claims_pct,delta_loss_pct,weeks_scn,weeks_ctr`.
void write_projection_csv(std::ostream& out, const std::vector<ProjectionResult>& results);

/// `scenario,week_start,N_hat,L_hat`.
void write_projected_series_csv(std::ostream& out, const std::vector<ProjectionResult>& results);

} // namespace wrisk
