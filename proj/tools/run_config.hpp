#pragma once

#include "wrisk/data_ingest.hpp"
#include "wrisk/risk_pipeline.hpp"
#include "wrisk/synthetic.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace wrisk::app {

struct ScenarioInput {
    std::string label;
    std::string path;
};

struct SynthScenario {
    std::string label;
    SynthConfig config;
};

/// Everything a command needs, resolved from the config file and flags.
/// Relative paths in the file are taken relative to the file's directory.
struct RunConfig {
    std::string control_path;
    std::vector<ScenarioInput> scenarios;
    ColumnMapping columns;
    AggregationOptions aggregation;

    SynthConfig synth;
    std::vector<SynthScenario> synth_scenarios;

    TwoStageConfig model;
    ProjectionOptions projection;
    std::string model_path; // empty: <out>/two_stage_model.txt

    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
    bool plots = false;
};

/// `section.key` -> value, e.g. {"ga.generations", "20"}.
using Override = std::pair<std::string, std::string>;

/// Reads the INI file (if any), applies the overrides in order and
/// validates every key. Throws ConfigError naming the offending key.
RunConfig load_run_config(const std::optional<std::string>& path, const std::vector<Override>& overrides);

/// Parses INI text; `base_dir` resolves relative paths.
RunConfig parse_run_config(const std::string& text, const std::string& base_dir,
                           const std::vector<Override>& overrides);

} // namespace wrisk::app
