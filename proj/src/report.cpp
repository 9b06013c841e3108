#include "ncs/report.hpp"

#include "ncs/errors.hpp"
#include "ncs/version.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace ncs {

std::string format_sig17(double value) {
    if (!std::isfinite(value)) return "null";
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

namespace {

void dump_value(const ordered_json& value, std::string& out, int depth) {
    const std::string pad(static_cast<size_t>(depth) * 2, ' ');
    const std::string inner_pad(static_cast<size_t>(depth + 1) * 2, ' ');
    switch (value.type()) {
        case nlohmann::detail::value_t::object: {
            if (value.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            size_t i = 0;
            for (const auto& item : value.items()) {
                out += inner_pad;
                out += ordered_json(item.key()).dump();
                out += ": ";
                dump_value(item.value(), out, depth + 1);
                if (++i < value.size()) out += ",";
                out += "\n";
            }
            out += pad + "}";
            return;
        }
        case nlohmann::detail::value_t::array: {
            if (value.empty()) {
                out += "[]";
                return;
            }
            // Arrays of plain numbers stay on one line; anything nested wraps.
            bool flat = true;
            for (const auto& item : value)
                if (item.is_structured()) flat = false;
            if (flat) {
                out += "[";
                for (size_t i = 0; i < value.size(); ++i) {
                    if (i) out += ", ";
                    dump_value(value[i], out, depth);
                }
                out += "]";
                return;
            }
            out += "[\n";
            for (size_t i = 0; i < value.size(); ++i) {
                out += inner_pad;
                dump_value(value[i], out, depth + 1);
                if (i + 1 < value.size()) out += ",";
                out += "\n";
            }
            out += pad + "]";
            return;
        }
        case nlohmann::detail::value_t::number_float:
            out += format_sig17(value.get<double>());
            return;
        default:
            out += value.dump();
            return;
    }
}

}  // namespace

std::string dump_json(const ordered_json& value) {
    std::string out;
    dump_value(value, out, 0);
    out += "\n";
    return out;
}

void write_json_file(const std::filesystem::path& path, const ordered_json& value) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << dump_json(value);
}

ordered_json matrix_to_json(const Eigen::MatrixXd& m) {
    ordered_json rows = ordered_json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const ordered_json& node) {
    if (!node.is_array() || node.empty() || !node[0].is_array())
        throw std::runtime_error("matrix_from_json: expected an array of rows");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(node.size()),
                      static_cast<Eigen::Index>(node[0].size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            m(r, c) = node[static_cast<size_t>(r)][static_cast<size_t>(c)].get<double>();
    return m;
}

ordered_json certificate_report(const NcsModel& model, const NcsAnalysis& analysis,
                                const std::map<int, SynthesisMethod>& methods, RngSeed seed) {
    ordered_json report;
    report["tool"] = kToolName;
    report["version"] = kToolVersion;
    report["prng"] = kPrngName;
    report["seed"] = seed.value;
    report["loss_probability"] = model.network.loss_probability;
    report["overall_stable"] = analysis.all_stable;

    ordered_json plants = ordered_json::array();
    for (const PlantStability& entry : analysis.plants) {
        ordered_json node;
        node["index"] = entry.plant_index;
        node["pi_s"] = entry.probs.closed_loop;
        node["pi_u"] = entry.probs.open_loop;
        node["second_moment_radius"] = entry.decision.radius;
        node["stable"] = entry.decision.stable;
        node["marginal"] = entry.decision.marginal;
        auto method = methods.find(entry.plant_index);
        if (method != methods.end()) node["synthesis_method"] = to_string(method->second);
        if (entry.decision.certificate) {
            const StabilityCertificate& cert = *entry.decision.certificate;
            node["P_s"] = matrix_to_json(cert.P_s);
            node["P_u"] = matrix_to_json(cert.P_u);
            node["P_hat"] = matrix_to_json(cert.P_hat);
            node["residual_s"] = matrix_to_json(cert.residual_s);
            node["residual_u"] = matrix_to_json(cert.residual_u);
        }
        plants.push_back(std::move(node));
    }
    report["plants"] = std::move(plants);
    return report;
}

ordered_json cost_report(const SimulationConfig& config,
                         const std::vector<CostEstimate>& estimates) {
    ordered_json report;
    report["tool"] = kToolName;
    report["version"] = kToolVersion;
    report["prng"] = kPrngName;
    report["seed"] = config.seed.value;
    report["horizon"] = config.horizon;
    report["runs"] = config.runs;
    report["schedule_mode"] = to_string(config.schedule_mode);
    report["loss_mode"] = to_string(config.loss_mode);
    report["tie_channels"] = config.tie_channels;
    report["x0_box"] = config.x0_box;

    ordered_json plants = ordered_json::array();
    for (size_t p = 0; p < estimates.size(); ++p) {
        const CostEstimate& est = estimates[p];
        ordered_json node;
        node["index"] = static_cast<int>(p) + 1;
        node["mean"] = est.mean;
        node["stddev"] = est.stddev;
        node["tail_mass"] = est.tail_mass;
        node["closed_loop_frequency"] = est.closed_loop_frequency;
        node["completed_runs"] = est.completed_runs;
        node["diverged_runs"] = est.diverged_runs;
        plants.push_back(std::move(node));
    }
    report["plants"] = std::move(plants);
    return report;
}

ordered_json sweep_report(const std::vector<SweepEntry>& entries, double grid_step) {
    ordered_json report;
    report["tool"] = kToolName;
    report["version"] = kToolVersion;
    report["grid_step"] = grid_step;
    report["feasible_count"] = entries.size();
    ordered_json list = ordered_json::array();
    for (const SweepEntry& entry : entries) {
        ordered_json node;
        node["sets"] = entry.sets;
        node["probabilities"] = entry.probabilities;
        node["worst_radius"] = entry.worst_radius;
        list.push_back(std::move(node));
    }
    report["feasible"] = std::move(list);
    return report;
}

ordered_json model_to_json(const ExperimentConfig& config) {
    ordered_json root;
    ordered_json plants = ordered_json::array();
    for (const Plant& plant : config.model.plants) {
        ordered_json node;
        node["A"] = matrix_to_json(plant.A);
        node["B"] = matrix_to_json(plant.B);
        if (plant.K) node["K"] = matrix_to_json(*plant.K);
        plants.push_back(std::move(node));
    }
    root["plants"] = std::move(plants);
    root["network"] = {{"capacity", config.model.network.capacity},
                       {"loss_probability", config.model.network.loss_probability}};
    root["partition"] = {{"sets", config.model.partition.sets},
                         {"probabilities", config.model.partition.probabilities}};
    root["simulation"] = {{"horizon", config.simulation.horizon},
                          {"runs", config.simulation.runs},
                          {"seed", config.simulation.seed.value},
                          {"schedule_mode", to_string(config.simulation.schedule_mode)},
                          {"loss_mode", to_string(config.simulation.loss_mode)},
                          {"tie_channels", config.simulation.tie_channels},
                          {"x0_box", config.simulation.x0_box}};
    root["synthesis"] = {{"beta_schedule", config.beta_schedule}};
    return root;
}

void write_schedule_csv(std::ostream& out, const ScheduleLogic& schedule) {
    out << "t,set_index\n";
    for (int t = 0; t < schedule.horizon; ++t)
        out << t << "," << schedule.assignments[static_cast<size_t>(t)] << "\n";
}

void write_loss_csv(std::ostream& out, const DataLossSignal& loss) {
    out << "t,channel,lost\n";
    for (int t = 0; t < loss.horizon; ++t)
        for (size_t m = 0; m < loss.channels.size(); ++m)
            out << t << "," << (m + 1) << ","
                << static_cast<int>(loss.channels[m][static_cast<size_t>(t)]) << "\n";
}

void write_trajectory_csv_header(std::ostream& out) { out << "run,t,plant,mode,norm_sq\n"; }

void write_trajectory_csv_rows(std::ostream& out, const TrajectoryRecord& record) {
    const size_t steps = record.modes.size();
    for (size_t t = 0; t < steps; ++t)
        out << record.run << "," << t << "," << record.plant_index << ","
            << mode_tag(record.modes[t]) << "," << format_sig17(record.norm_sq[t]) << "\n";
}

}  // namespace ncs
