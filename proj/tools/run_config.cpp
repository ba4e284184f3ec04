#include "run_config.hpp"

#include "wrisk/error.hpp"
#include "wrisk/text_io.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace wrisk::app {
namespace {

constexpr std::string_view kScenarioPrefix = "synth.scenario.";

struct Entry {
    std::string value;
    bool used = false;
};

// Order-preserving sections; every key must be consumed by the end.
class Settings {
public:
    void set(const std::string& section, const std::string& key, std::string value) {
        auto& s = section_(section);
        auto it = std::find_if(s.second.begin(), s.second.end(), [&](const auto& e) { return e.first == key; });
        if (it != s.second.end()) {
            it->second.value = std::move(value);
        } else {
            s.second.emplace_back(key, Entry{std::move(value)});
        }
    }

    std::optional<std::string> take(const std::string& section, const std::string& key) {
        for (auto& s : sections_) {
            if (s.first == section) {
                for (auto& e : s.second) {
                    if (e.first == key) {
                        e.second.used = true;
                        return e.second.value;
                    }
                }
            }
        }
        return std::nullopt;
    }

    /// All entries of a section, marked used.
    std::vector<std::pair<std::string, std::string>> take_all(const std::string& section) {
        std::vector<std::pair<std::string, std::string>> out;
        for (auto& s : sections_) {
            if (s.first == section) {
                for (auto& e : s.second) {
                    e.second.used = true;
                    out.emplace_back(e.first, e.second.value);
                }
            }
        }
        return out;
    }

    std::vector<std::string> section_names() const {
        std::vector<std::string> out;
        for (const auto& s : sections_) {
            out.push_back(s.first);
        }
        return out;
    }

    void check_all_used() const {
        for (const auto& s : sections_) {
            for (const auto& e : s.second) {
                if (!e.second.used) {
                    throw ConfigError("unknown setting " + s.first + "." + e.first);
                }
            }
        }
    }

private:
    using Section = std::pair<std::string, std::vector<std::pair<std::string, Entry>>>;

    Section& section_(const std::string& name) {
        for (auto& s : sections_) {
            if (s.first == name) {
                return s;
            }
        }
        sections_.push_back({name, {}});
        return sections_.back();
    }

    std::vector<Section> sections_;
};

std::string where(const std::string& section, const std::string& key) { return section + "." + key; }

double to_double(const std::string& section, const std::string& key, const std::string& text) {
    const auto v = parse_double(text);
    if (!v || !std::isfinite(*v)) {
        throw ConfigError(where(section, key) + ": expected a number, got '" + text + "'");
    }
    return *v;
}

std::uint64_t to_unsigned(const std::string& section, const std::string& key, const std::string& text) {
    const auto t = trim(text);
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || end != t.data() + t.size() || t.empty()) {
        throw ConfigError(where(section, key) + ": expected a non-negative integer, got '" + text + "'");
    }
    return v;
}

int to_int(const std::string& section, const std::string& key, const std::string& text) {
    const auto t = trim(text);
    int v = 0;
    const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || end != t.data() + t.size() || t.empty()) {
        throw ConfigError(where(section, key) + ": expected an integer, got '" + text + "'");
    }
    return v;
}

bool to_bool(const std::string& section, const std::string& key, const std::string& text) {
    const std::string t(trim(text));
    if (t == "true" || t == "yes" || t == "on" || t == "1") {
        return true;
    }
    if (t == "false" || t == "no" || t == "off" || t == "0") {
        return false;
    }
    throw ConfigError(where(section, key) + ": expected true or false, got '" + text + "'");
}

class Reader {
public:
    Reader(Settings& settings, std::string section) : s_(settings), section_(std::move(section)) {}

    void number(const std::string& key, double& out) {
        if (auto v = s_.take(section_, key)) {
            out = to_double(section_, key, *v);
        }
    }
    void size(const std::string& key, std::size_t& out) {
        if (auto v = s_.take(section_, key)) {
            out = static_cast<std::size_t>(to_unsigned(section_, key, *v));
        }
    }
    void integer(const std::string& key, int& out) {
        if (auto v = s_.take(section_, key)) {
            out = to_int(section_, key, *v);
        }
    }
    void flag(const std::string& key, bool& out) {
        if (auto v = s_.take(section_, key)) {
            out = to_bool(section_, key, *v);
        }
    }
    void text(const std::string& key, std::string& out) {
        if (auto v = s_.take(section_, key)) {
            out = std::string(trim(*v));
        }
    }
    std::optional<std::string> raw(const std::string& key) { return s_.take(section_, key); }
    const std::string& section() const { return section_; }

private:
    Settings& s_;
    std::string section_;
};

std::string resolve(const std::string& base_dir, const std::string& path) {
    if (path.empty() || base_dir.empty() || std::filesystem::path(path).is_absolute()) {
        return path;
    }
    return (std::filesystem::path(base_dir) / path).lexically_normal().string();
}

void check_label(const std::string& label, const std::string& context) {
    const bool ok = !label.empty() && std::all_of(label.begin(), label.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '-' || c == '.';
    });
    if (!ok) {
        throw ConfigError(context + ": label '" + label + "' may only use letters, digits, '_', '-' and '.'");
    }
}

// Keys shared by [synth] and every [synth.scenario.<label>] section.
void read_synth(Reader r, SynthConfig& c) {
    r.integer("weeks", c.weeks);
    if (auto start = r.raw("start")) {
        const auto d = parse_date(trim(*start));
        if (!d) {
            throw ConfigError(where(r.section(), "start") + ": expected YYYY-MM-DD, got '" + *start + "'");
        }
        c.start = *d;
    }
    r.number("wet_probability", c.wet_probability);
    r.number("precip_shape", c.precip_shape);
    r.number("precip_scale", c.precip_scale);
    r.number("precip_multiplier", c.precip_multiplier);
    r.number("claims_base", c.claims.base);
    r.number("claims_total", c.claims.total);
    r.number("claims_lag", c.claims.lag);
    r.number("claims_peak", c.claims.peak);
    r.number("claims_peak_scale", c.claims.peak_scale);
    r.number("severity_mean", c.severity_mean);
    r.number("severity_peak_gain", c.severity_peak_gain);
    r.number("severity_dispersion", c.severity_dispersion);
    r.number("noise", c.noise);
    r.number("homes_insured", c.homes_insured);
    r.number("annual_inflation", c.annual_inflation);
}

GeneBounds read_bounds(Reader& r, const std::string& name, GeneBounds log_bounds) {
    double lo = std::pow(10.0, log_bounds.lo);
    double hi = std::pow(10.0, log_bounds.hi);
    r.number(name + "_min", lo);
    r.number(name + "_max", hi);
    if (!(lo > 0.0) || !(hi > lo)) {
        throw ConfigError(r.section() + ": need 0 < " + name + "_min < " + name + "_max");
    }
    return {std::log10(lo), std::log10(hi)};
}

RunConfig interpret(Settings& s, const std::string& base_dir) {
    RunConfig rc;

    Reader run(s, "run");
    if (auto seed = run.raw("seed")) {
        rc.seed = to_unsigned("run", "seed", *seed);
    }

    Reader output(s, "output");
    output.text("dir", rc.out_dir);
    rc.out_dir = resolve(base_dir, rc.out_dir);
    output.flag("plots", rc.plots);

    Reader data(s, "data");
    data.text("control", rc.control_path);
    rc.control_path = resolve(base_dir, rc.control_path);
    data.text("date_column", rc.columns.date);
    data.text("precip_column", rc.columns.precip);
    data.text("claims_column", rc.columns.claims);
    data.text("loss_column", rc.columns.loss);
    data.text("homes_column", rc.columns.homes_insured);
    data.text("price_index_column", rc.columns.price_index);
    if (auto base = data.raw("base_price_index")) {
        rc.aggregation.base_price_index = to_double("data", "base_price_index", *base);
    }

    for (const auto& [label, path] : s.take_all("scenarios")) {
        check_label(label, "scenarios");
        rc.scenarios.push_back({label, resolve(base_dir, std::string(trim(path)))});
    }

    read_synth(Reader(s, "synth"), rc.synth);
    if (rc.seed) {
        rc.synth.seed = *rc.seed;
    }
    std::uint64_t offset = 0;
    for (const auto& name : s.section_names()) {
        if (name.rfind(kScenarioPrefix, 0) != 0) {
            continue;
        }
        SynthScenario scn{name.substr(kScenarioPrefix.size()), rc.synth};
        check_label(scn.label, name);
        scn.config.with_targets = false;
        scn.config.seed = rc.synth.seed + ++offset;
        Reader r(s, name);
        read_synth(r, scn.config);
        if (auto seed = r.raw("seed")) {
            scn.config.seed = to_unsigned(name, "seed", *seed);
        }
        std::optional<int> first;
        std::optional<int> last;
        if (auto v = r.raw("first_year")) {
            first = to_int(name, "first_year", *v);
        }
        if (auto v = r.raw("last_year")) {
            last = to_int(name, "last_year", *v);
        }
        if (first.has_value() != last.has_value()) {
            throw ConfigError(name + ": first_year and last_year go together");
        }
        if (first) {
            cover_years(scn.config, *first, *last);
        }
        validate(scn.config);
        rc.synth_scenarios.push_back(std::move(scn));
    }
    validate(rc.synth);

    TwoStageConfig& m = rc.model;
    Reader model(s, "model");
    if (auto kind = model.raw("kind")) {
        m.kind = parse_model_kind(trim(*kind));
    }

    Reader svr(s, "svr");
    svr.number("C", m.svr.C);
    if (auto kernel = svr.raw("kernel")) {
        const std::string k(trim(*kernel));
        if (k == "linear") {
            m.svr.kernel = KernelSpec::linear();
        } else if (k != "rbf") {
            throw ConfigError("svr.kernel: expected rbf or linear, got '" + k + "'");
        }
    }
    if (m.svr.kernel.kind == KernelSpec::Kind::Rbf) {
        svr.number("sigma2", m.svr.kernel.sigma2);
    }
    svr.number("epsilon", m.svr.epsilon);
    svr.number("tolerance", m.solver.tolerance);
    svr.size("max_iterations", m.solver.max_iterations);
    try {
        validate(m.svr);
    } catch (const FitError& e) {
        throw ConfigError(e.what());
    }
    if (!(m.solver.tolerance > 0.0) || m.solver.max_iterations == 0) {
        throw ConfigError("svr: tolerance and max_iterations must be positive");
    }

    Reader ga(s, "ga");
    GaConfig& g = m.ga;
    ga.size("population_size", g.population_size);
    ga.size("generations", g.generations);
    ga.size("tournament_size", g.tournament_size);
    ga.number("crossover_probability", g.crossover_probability);
    ga.number("blend_alpha", g.blend_alpha);
    ga.number("mutation_probability", g.mutation_probability);
    ga.number("mutation_scale", g.mutation_scale);
    ga.size("elite_count", g.elite_count);
    ga.flag("seed_default_member", g.seed_default_member);
    if (auto fitness = ga.raw("fitness")) {
        const std::string f(trim(*fitness));
        if (f == "training") {
            g.fitness_mode = FitnessMode::TrainingRmse;
        } else if (f == "cv") {
            g.fitness_mode = FitnessMode::CrossValidatedRmse;
        } else {
            throw ConfigError("ga.fitness: expected training or cv, got '" + f + "'");
        }
    }
    ga.size("folds", g.folds);
    ga.size("threads", g.threads);
    g.bounds[0] = read_bounds(ga, "C", g.bounds[0]);
    g.bounds[1] = read_bounds(ga, "sigma2", g.bounds[1]);
    g.bounds[2] = read_bounds(ga, "epsilon", g.bounds[2]);
    if (rc.seed) {
        g.seed = *rc.seed;
    }
    validate(g);

    Reader ann(s, "ann");
    ann.size("hidden", m.ann_hidden);
    ann.number("learning_rate", m.ann.learning_rate);
    ann.size("epochs", m.ann.epochs);
    ann.number("init_scale", m.ann.init_scale);
    std::size_t batch = 0;
    ann.size("batch_size", batch);
    if (batch > 0) {
        m.ann.batch_size = batch;
    }
    if (rc.seed) {
        m.ann.seed = *rc.seed;
    }
    validate(m.ann);
    if (m.ann_hidden == 0) {
        throw ConfigError("ann.hidden must be at least 1");
    }

    Reader project(s, "project");
    if (auto v = project.raw("first_year")) {
        rc.projection.first_year = to_int("project", "first_year", *v);
    }
    if (auto v = project.raw("last_year")) {
        rc.projection.last_year = to_int("project", "last_year", *v);
    }
    project.text("model", rc.model_path);
    rc.model_path = resolve(base_dir, rc.model_path);

    s.check_all_used();
    return rc;
}

Settings read_settings(const std::string& text) {
    boost::property_tree::ptree tree;
    std::istringstream in(text);
    try {
        boost::property_tree::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError("config: " + std::string(e.what()));
    }
    Settings s;
    for (const auto& [section, entries] : tree) {
        if (entries.empty()) {
            throw ConfigError("config: setting '" + section + "' outside a section");
        }
        for (const auto& [key, value] : entries) {
            s.set(section, key, value.data());
        }
    }
    return s;
}

} // namespace

RunConfig parse_run_config(const std::string& text, const std::string& base_dir,
                           const std::vector<Override>& overrides) {
    Settings s = read_settings(text);
    for (const auto& [name, value] : overrides) {
        const auto dot = name.rfind('.');
        if (dot == std::string::npos || dot == 0 || dot + 1 == name.size()) {
            throw ConfigError("override '--" + name + "' must look like --section.key=value");
        }
        s.set(name.substr(0, dot), name.substr(dot + 1), value);
    }
    return interpret(s, base_dir);
}

RunConfig load_run_config(const std::optional<std::string>& path, const std::vector<Override>& overrides) {
    if (!path) {
        return parse_run_config("", "", overrides);
    }
    std::ifstream in(*path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open config file " + *path);
    }
    std::ostringstream text;
    text << in.rdbuf();
    const auto dir = std::filesystem::path(*path).parent_path().string();
    return parse_run_config(text.str(), dir, overrides);
}

} // namespace wrisk::app
