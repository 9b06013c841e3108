#pragma once

#include "ncs/model.hpp"
#include "ncs/simulation.hpp"
#include "ncs/synthesis.hpp"

#include <filesystem>
#include <string_view>
#include <vector>

namespace ncs {

/// Everything an experiment file declares: the model, simulation settings and
/// synthesis settings (the latter two fall back to module defaults).
struct ExperimentConfig {
    NcsModel model;
    SimulationConfig simulation;
    std::vector<double> beta_schedule = kDefaultBetaSchedule;
};

/// Parse and fully validate a UTF-8 JSON experiment file. The schema is
/// strict: unknown keys are rejected and every failure names the JSON path
/// (plants addressed 1-based). Throws ConfigError.
ExperimentConfig parse_config(const std::filesystem::path& path);

/// Same, from in-memory text.
ExperimentConfig parse_config_text(std::string_view text);

const char* to_string(SequenceMode mode);

}  // namespace ncs
