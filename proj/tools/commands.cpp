#include "commands.hpp"

#include "svg_plot.hpp"

#include "wrisk/error.hpp"
#include "wrisk/metrics.hpp"
#include "wrisk/serialize.hpp"
#include "wrisk/synthetic.hpp"
#include "wrisk/text_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace wrisk::app {
namespace {

namespace fs = std::filesystem;

using Outputs = std::vector<std::pair<std::string, std::string>>; // file name, content

void write_outputs(const RunConfig& config, const Outputs& files, std::ostream& log) {
    try {
        fs::create_directories(config.out_dir);
        for (const auto& [name, content] : files) {
            const auto path = (fs::path(config.out_dir) / name).lexically_normal().string();
            write_file_atomic(path, content);
            log << "wrote " << path << '\n';
        }
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("cannot write output: ") + e.what());
    }
}

template <typename Writer>
std::string render(Writer&& write) {
    std::ostringstream s;
    write(s);
    return s.str();
}

void require_seed(const RunConfig& config, const char* command) {
    if (!config.seed) {
        throw ConfigError(std::string(command) + " needs a seed: pass --seed or set run.seed");
    }
}

WeeklySeries load_series(const std::string& path, const RunConfig& config, const std::string& label) {
    auto series = aggregate_weekly(read_daily_csv(path, config.columns), config.aggregation);
    series.label = label;
    return series;
}

WeeklySeries load_control(const RunConfig& config) {
    if (config.control_path.empty()) {
        throw ConfigError("data.control is not set");
    }
    const auto daily = read_daily_csv(config.control_path, config.columns);
    const auto has = [&](auto member) {
        return std::any_of(daily.begin(), daily.end(), [&](const DailyRecord& r) { return (r.*member).has_value(); });
    };
    if (!has(&DailyRecord::claims)) {
        throw DataError(config.control_path + ": no '" + config.columns.claims + "' column");
    }
    if (!has(&DailyRecord::loss_nominal)) {
        throw DataError(config.control_path + ": no '" + config.columns.loss + "' column");
    }
    auto series = aggregate_weekly(daily, config.aggregation);
    series.label = "control";
    return series;
}

std::string hyperparams_line(const StageProvenance& p) {
    if (!p.hyperparams) {
        return "n/a";
    }
    const auto& h = *p.hyperparams;
    std::string kernel = h.kernel.kind == KernelSpec::Kind::Rbf ? "sigma2 " + format_double(h.kernel.sigma2)
                                                                 : std::string("kernel linear");
    return "C " + format_double(h.C) + ", " + kernel + ", epsilon " + format_double(h.epsilon);
}

std::string fit_report(const TwoStageModel& model, const RunConfig& config) {
    std::ostringstream s;
    s << "model " << to_string(model.kind) << '\n';
    s << "control " << config.control_path << '\n';
    s << "control weeks " << model.control.weeks << " (" << model.control.first_year << "-"
      << model.control.last_year << ", " << model.control.years() << " years)\n";
    s << "control claims sum " << format_double(model.control.claims_sum) << '\n';
    s << "control loss sum " << format_double(model.control.loss_sum) << '\n';
    const auto stage = [&](const char* name, const StageProvenance& p) {
        s << '\n' << "[" << name << "]\n";
        s << "hyperparameters " << hyperparams_line(p) << '\n';
        s << "training rmse " << format_double(p.training_rmse) << '\n';
        if (p.ga) {
            s << "ga evaluations " << p.evaluations << '\n';
            s << "ga best fitness " << format_double(p.ga->best_fitness) << '\n';
            s << "ga history ga_history_" << name << ".csv\n";
        }
    };
    stage("claims", model.claims_provenance);
    stage("loss", model.loss_provenance);
    return s.str();
}

std::string model_path(const RunConfig& config) {
    return config.model_path.empty() ? (fs::path(config.out_dir) / "two_stage_model.txt").string()
                                     : config.model_path;
}

TwoStageModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open model file " + path);
    }
    try {
        return read_two_stage_model(in);
    } catch (const ModelVersionError& e) {
        throw ModelVersionError(path + ": " + e.what());
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

} // namespace

void cmd_synth(const RunConfig& config, std::ostream& log) {
    Outputs files;
    const auto control = generate_synthetic_data(config.synth);
    files.emplace_back("control_daily.csv", render([&](std::ostream& s) { write_daily_csv(s, control.daily); }));
    files.emplace_back("control_weekly.csv", render([&](std::ostream& s) { write_weekly_csv(s, control.weekly); }));
    for (const auto& scn : config.synth_scenarios) {
        const auto data = generate_synthetic_data(scn.config);
        files.emplace_back("scenario_" + scn.label + "_daily.csv",
                           render([&](std::ostream& s) { write_daily_csv(s, data.daily); }));
    }
    write_outputs(config, files, log);
}

void cmd_fit(const RunConfig& config, std::ostream& log) {
    require_seed(config, "fit");
    const auto control = load_control(config);
    const auto model = fit_two_stage(control, config.model);
    Outputs files;
    files.emplace_back("two_stage_model.txt", to_text(model));
    files.emplace_back("fit_report.txt", fit_report(model, config));
    if (model.claims_provenance.ga) {
        files.emplace_back("ga_history_claims.csv",
                           render([&](std::ostream& s) { write_ga_log_csv(s, *model.claims_provenance.ga); }));
        files.emplace_back("ga_history_loss.csv",
                           render([&](std::ostream& s) { write_ga_log_csv(s, *model.loss_provenance.ga); }));
    }
    write_outputs(config, files, log);
}

int cmd_compare(const RunConfig& config, std::ostream& log) {
    require_seed(config, "compare");
    const auto control = load_control(config);
    const auto comparison = compare_models(control, config.model);
    Outputs files;
    files.emplace_back("comparison.csv", render([&](std::ostream& s) { write_comparison_csv(s, comparison); }));
    if (config.plots) {
        files.emplace_back("fitted_claims.svg", fitted_svg(comparison, false));
        files.emplace_back("fitted_loss.svg", fitted_svg(comparison, true));
    }
    write_outputs(config, files, log);
    bool any = false;
    for (const auto& row : comparison.rows) {
        if (row.ok()) {
            any = true;
        } else {
            log << to_string(row.kind) << " failed: " << row.error << '\n';
        }
    }
    return any ? 0 : static_cast<int>(Error::Kind::Fit);
}

void cmd_project(const RunConfig& config, std::ostream& log, std::ostream& warn) {
    const auto model = load_model(model_path(config));
    if (config.scenarios.empty()) {
        throw ConfigError("no scenarios configured: add a [scenarios] section with label = path entries");
    }
    std::vector<WeeklySeries> scenarios;
    for (const auto& s : config.scenarios) {
        scenarios.push_back(load_series(s.path, config, s.label));
    }
    const auto results = project_report(model, scenarios, config.projection);
    for (const auto& r : results) {
        for (const auto& w : r.warnings) {
            warn << "warning: " << w << '\n';
        }
    }
    Outputs files;
    files.emplace_back("projection.csv", render([&](std::ostream& s) { write_projection_csv(s, results); }));
    files.emplace_back("projected_series.csv",
                       render([&](std::ostream& s) { write_projected_series_csv(s, results); }));
    if (config.plots) {
        files.emplace_back("projection_claims.svg", projection_svg(results, false));
        files.emplace_back("projection_loss.svg", projection_svg(results, true));
    }
    write_outputs(config, files, log);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Weather-driven home insurance claims and losses: fit, compare and project"};
    app.name("wrisk");
    app.require_subcommand(1);

    struct Common {
        std::optional<std::string> config;
        std::optional<std::uint64_t> seed;
        std::optional<std::string> out;
        std::optional<std::string> model;
    } common;

    const auto add = [&](const std::string& name, const std::string& about) {
        auto* sub = app.add_subcommand(name, about);
        sub->add_option("--config", common.config, "INI configuration file");
        sub->add_option("--seed", common.seed, "random seed (overrides run.seed)");
        sub->add_option("--out", common.out, "output directory (overrides output.dir)");
        sub->allow_extras();
        sub->footer("Any setting can be overridden with --section.key=value, e.g. --ga.generations=20.");
        return sub;
    };
    auto* synth = add("synth", "generate synthetic daily control and scenario CSVs");
    auto* fit = add("fit", "fit the two-stage model on the control data");
    auto* compare = add("compare", "compare ANN, SVR and GA-SVR training errors");
    auto* project = add("project", "project percentage changes for the scenarios");
    project->add_option("--model", common.model, "model file (default <out>/two_stage_model.txt)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(Error::Kind::Config);
    }

    try {
        CLI::App* active = app.get_subcommands().front();
        std::vector<Override> overrides;
        const auto extras = active->remaining();
        for (std::size_t k = 0; k < extras.size(); ++k) {
            const std::string& a = extras[k];
            if (a.rfind("--", 0) != 0 || a.size() <= 2) {
                throw ConfigError("unexpected argument '" + a + "'");
            }
            const auto eq = a.find('=');
            if (eq != std::string::npos) {
                overrides.emplace_back(a.substr(2, eq - 2), a.substr(eq + 1));
            } else if (k + 1 < extras.size()) {
                overrides.emplace_back(a.substr(2), extras[++k]);
            } else {
                throw ConfigError("missing value for '" + a + "'");
            }
        }
        if (common.seed) {
            overrides.emplace_back("run.seed", std::to_string(*common.seed));
        }
        if (common.out) {
            overrides.emplace_back("output.dir", fs::absolute(*common.out).string());
        }
        if (common.model) {
            overrides.emplace_back("project.model", fs::absolute(*common.model).string());
        }
        const RunConfig config = load_run_config(common.config, overrides);

        if (active == synth) {
            cmd_synth(config, out);
        } else if (active == fit) {
            cmd_fit(config, out);
        } else if (active == compare) {
            return cmd_compare(config, out);
        } else {
            cmd_project(config, out, err);
        }
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.exit_code();
    }
}

} // namespace wrisk::app
