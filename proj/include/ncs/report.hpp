#pragma once

#include "ncs/config.hpp"
#include "ncs/scheduling.hpp"
#include "ncs/simulation.hpp"
#include "ncs/stability.hpp"
#include "ncs/sweep.hpp"
#include "ncs/synthesis.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <ostream>
#include <string>

namespace ncs {

using ordered_json = nlohmann::ordered_json;

/// 17-significant-digit rendering of a double (lossless round trip).
std::string format_sig17(double value);

/// Deterministic serialization: insertion-ordered keys, 2-space indent,
/// doubles rendered by format_sig17.
std::string dump_json(const ordered_json& value);

void write_json_file(const std::filesystem::path& path, const ordered_json& value);

ordered_json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const ordered_json& node);

/// Per-plant stability verdicts and certificates plus tool/seed metadata.
/// `methods` optionally names how each plant's gain was produced.
ordered_json certificate_report(const NcsModel& model, const NcsAnalysis& analysis,
                                const std::map<int, SynthesisMethod>& methods, RngSeed seed);

ordered_json cost_report(const SimulationConfig& config,
                         const std::vector<CostEstimate>& estimates);

ordered_json sweep_report(const std::vector<SweepEntry>& entries, double grid_step);

/// The experiment config in its on-disk schema (re-parseable by parse_config).
ordered_json model_to_json(const ExperimentConfig& config);

void write_schedule_csv(std::ostream& out, const ScheduleLogic& schedule);
void write_loss_csv(std::ostream& out, const DataLossSignal& loss);

void write_trajectory_csv_header(std::ostream& out);
void write_trajectory_csv_rows(std::ostream& out, const TrajectoryRecord& record);

}  // namespace ncs
