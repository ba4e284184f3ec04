#include "wrisk/error.hpp"
#include "wrisk/metrics.hpp"
#include "wrisk/risk_pipeline.hpp"
#include "wrisk/synthetic.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace wrisk;

namespace {

SynthConfig noiseless(std::uint64_t seed) {
    SynthConfig s;
    s.seed = seed;
    s.noise = 0.0;
    s.severity_dispersion = 0.0;
    return s;
}

WeeklySeries strip_targets(WeeklySeries series, std::string label) {
    for (auto& r : series.records) {
        r.claims.reset();
        r.loss.reset();
    }
    series.label = std::move(label);
    return series;
}

TwoStageConfig memorizing_config() {
    TwoStageConfig c;
    c.kind = ModelKind::Svr;
    c.svr.C = 1000.0;
    c.svr.epsilon = 1e-3;
    c.svr.kernel = KernelSpec::rbf(1e-3);
    return c;
}

TwoStageConfig fixed_svr() {
    TwoStageConfig c;
    c.kind = ModelKind::Svr;
    return c;
}

} // namespace

TEST_CASE("delta hand values") {
    CHECK(std::abs(delta(230.0, 200.0) - 15.0) <= 1e-12);
    CHECK(delta(200.0, 200.0) == 0.0);
    CHECK(std::abs(delta(100.0, 200.0) + 50.0) <= 1e-12);
    CHECK(delta(0.0, 5.0) == -100.0);
    CHECK_THROWS_AS(delta(1.0, 0.0), DataError);
    CHECK_THROWS_AS(delta(1.0, -3.0), DataError);
}

TEST_CASE("split_subperiods") {
    const auto p = split_subperiods(2021, 2080, 10);
    REQUIRE(p.size() == 6);
    CHECK(p.front() == SubPeriod{"2021-2030", 2021, 2030});
    CHECK(p.back() == SubPeriod{"2071-2080", 2071, 2080});
    for (std::size_t k = 1; k < p.size(); ++k) {
        CHECK(p[k].start_year == p[k - 1].end_year + 1);
    }
    CHECK(split_subperiods(2002, 2002, 1).size() == 1);
    try {
        split_subperiods(2021, 2075, 10);
        FAIL("expected a divisibility error");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("span not divisible") != std::string::npos);
    }
    CHECK_THROWS_AS(split_subperiods(2021, 2030, 0), DataError);
    CHECK_THROWS_AS(split_subperiods(2030, 2021, 1), DataError);
}

TEST_CASE("model kind names") {
    CHECK(to_string(ModelKind::GaSvr) == "GA-SVR");
    CHECK(parse_model_kind("GA-SVR") == ModelKind::GaSvr);
    CHECK(parse_model_kind("svr") == ModelKind::Svr);
    CHECK(parse_model_kind("Ann") == ModelKind::Ann);
    CHECK_THROWS_AS(parse_model_kind("forest"), ConfigError);
}

TEST_CASE("cover_years spans whole ISO week-years") {
    SynthConfig s;
    cover_years(s, 2021, 2030);
    CHECK(s.start == make_date(2021, 1, 4));
    const Date last = s.start + std::chrono::days{7 * (s.weeks - 1)};
    CHECK(iso_week_year(s.start) == 2021);
    CHECK(iso_week_year(last) == 2030);
    CHECK(iso_week_year(last + std::chrono::days{7}) == 2031);
    CHECK_THROWS_AS(cover_years(s, 2030, 2021), ConfigError);
}

TEST_CASE("fit_two_stage with fixed hyperparameters") {
    SynthConfig s;
    s.weeks = 156;
    const auto control = generate_synthetic(s);
    const auto model = fit_two_stage(control, fixed_svr());
    CHECK(model.kind == ModelKind::Svr);
    CHECK(model.claims_provenance.evaluations == 0);
    CHECK_FALSE(model.claims_provenance.ga.has_value());
    CHECK(*model.claims_provenance.hyperparams == default_svr_hyperparams());
    CHECK(input_dimension(model.claims_model) == 3);
    CHECK(input_dimension(model.loss_model) == 4);

    const auto claims = build_claims_features(control);
    double sum = 0.0;
    for (double v : claims.y) {
        sum += v;
    }
    CHECK(model.control.claims_sum == doctest::Approx(sum).epsilon(1e-14));
    CHECK(model.control.weeks == control.size() - 1);
    CHECK(model.control.first_year == 2002);
    CHECK(model.control.last_year == 2004);
    CHECK(model.control.years() == 3);
}

TEST_CASE("fit_two_stage with the GA records provenance for both stages") {
    SynthConfig s;
    s.weeks = 80;
    const auto control = generate_synthetic(s);
    TwoStageConfig c;
    c.ga.population_size = 6;
    c.ga.generations = 3;
    const auto model = fit_two_stage(control, c);
    REQUIRE(model.claims_provenance.ga.has_value());
    REQUIRE(model.loss_provenance.ga.has_value());
    CHECK(model.claims_provenance.evaluations == 18);
    CHECK(model.loss_provenance.evaluations == 18);
    CHECK(model.claims_provenance.ga->history.size() == 3);

    const auto fixed = fit_two_stage(control, fixed_svr());
    CHECK(model.claims_provenance.training_rmse <= fixed.claims_provenance.training_rmse);
    CHECK(model.loss_provenance.training_rmse <= fixed.loss_provenance.training_rmse);
}

TEST_CASE("fit_two_stage needs targets") {
    SynthConfig s;
    s.weeks = 30;
    s.with_targets = false;
    CHECK_THROWS_AS(fit_two_stage(generate_synthetic(s), fixed_svr()), DataError);
}

TEST_CASE("memorizing model replays the control almost exactly") {
    const auto control = generate_synthetic(noiseless(11));
    const auto model = fit_two_stage(control, memorizing_config());
    CHECK(model.control.years() == 10);

    const auto results = project_report(model, {strip_targets(control, "replay")});
    REQUIRE(results.size() == 1);
    REQUIRE(results[0].periods.size() == 1);
    const auto& p = results[0].periods[0];
    CHECK(p.weeks == model.control.weeks);
    CHECK(std::abs(p.delta_claims) < 1.0);
    CHECK(std::abs(p.delta_loss) < 1.0);
    CHECK(results[0].warnings.empty());
}

TEST_CASE("project feeds the predicted claims into the loss stage") {
    SynthConfig s;
    s.weeks = 104;
    const auto control = generate_synthetic(s);
    const auto model = fit_two_stage(control, fixed_svr());
    s.seed = 77;
    s.precip_multiplier = 1.5;
    s.with_targets = false;
    const auto scenario = generate_synthetic(s);
    const auto proj = project(model, scenario);
    REQUIRE(proj.weeks.size() == scenario.size() - 1);
    for (std::size_t t = 0; t < proj.weeks.size(); ++t) {
        const auto& now = scenario.records[t + 1];
        const auto& prev = scenario.records[t];
        const std::vector<double> x{now.total_precip, prev.total_precip, now.max_daily_precip};
        CHECK(proj.claims[t] == std::max(0.0, predict(model.claims_model, x)));
        const std::vector<double> x4{now.total_precip, prev.total_precip, now.max_daily_precip, proj.claims[t]};
        CHECK(proj.loss[t] == std::max(0.0, predict(model.loss_model, x4)));
    }
}

TEST_CASE("projections are clamped at zero") {
    SynthConfig s;
    s.weeks = 104;
    const auto control = generate_synthetic(s);
    TwoStageConfig c = fixed_svr();
    c.svr.kernel = KernelSpec::linear();
    const auto model = fit_two_stage(control, c);
    WeeklySeries dry = strip_targets(control, "dry");
    for (auto& r : dry.records) {
        r.total_precip = 0.0;
        r.max_daily_precip = 0.0;
    }
    WeeklySeries flood = strip_targets(control, "flood");
    for (auto& r : flood.records) {
        r.total_precip = -1000.0;
        r.max_daily_precip = -1000.0;
    }
    for (const auto& scenario : {dry, flood}) {
        const auto proj = project(model, scenario);
        for (std::size_t t = 0; t < proj.weeks.size(); ++t) {
            CHECK(proj.claims[t] >= 0.0);
            CHECK(proj.loss[t] >= 0.0);
        }
    }
}

TEST_CASE("project_report keeps scenario order and uses control-length sub-periods") {
    SynthConfig s;
    s.weeks = 260;
    s.seed = 4;
    const auto control = generate_synthetic(s);
    const auto model = fit_two_stage(control, fixed_svr());
    REQUIRE(model.control.years() == 5);

    SynthConfig scn;
    scn.with_targets = false;
    scn.seed = 9;
    cover_years(scn, 2021, 2040);
    auto wet = generate_synthetic(scn);
    wet.label = "wet";
    scn.precip_multiplier = 0.5;
    auto dry = generate_synthetic(scn);
    dry.label = "dry";

    const auto results = project_report(model, {wet, dry});
    REQUIRE(results.size() == 2);
    CHECK(results[0].scenario == "wet");
    CHECK(results[1].scenario == "dry");
    REQUIRE(results[0].periods.size() == 4);
    CHECK(results[0].periods[0].period.label == "2021-2025");
    CHECK(results[0].periods[3].period.label == "2036-2040");
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(results[1].periods[k].delta_claims < results[0].periods[k].delta_claims);
    }

    ProjectionOptions narrow;
    narrow.first_year = 2026;
    narrow.last_year = 2035;
    const auto cut = project_report(model, {wet}, narrow);
    REQUIRE(cut[0].periods.size() == 2);
    CHECK(cut[0].periods[0].delta_claims == results[0].periods[1].delta_claims);

    std::ostringstream csv;
    write_projection_csv(csv, results);
    const std::string text = csv.str();
    CHECK(text.rfind("scenario,subperiod,delta_claims_pct,delta_loss_pct,weeks_scn,weeks_ctr\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 9);
    std::ostringstream series;
    write_projected_series_csv(series, results);
    CHECK(series.str().rfind("scenario,week_start,N_hat,L_hat\nwet,2021-01-11,", 0) == 0);

    narrow.first_year = 2021;
    narrow.last_year = 2027;
    CHECK_THROWS_AS(project_report(model, {wet}, narrow), DataError);
}

TEST_CASE("more precipitation raises projected claims under a monotone generator") {
    SynthConfig s;
    s.seed = 8;
    const auto control = generate_synthetic(s);
    const auto model = fit_two_stage(control, fixed_svr());
    SynthConfig scn;
    scn.seed = 31;
    scn.with_targets = false;
    scn.precip_multiplier = 1.2;
    cover_years(scn, 2021, 2080);
    const auto results = project_report(model, {generate_synthetic(scn)});
    REQUIRE(results[0].periods.size() == 6);
    for (const auto& p : results[0].periods) {
        CHECK(p.delta_claims > 0.0);
    }
}
