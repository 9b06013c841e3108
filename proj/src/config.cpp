#include "ncs/config.hpp"

#include "ncs/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

namespace ncs {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

void require_object(const json& node, const std::string& path) {
    if (!node.is_object()) fail(path, "expected a JSON object");
}

void reject_unknown_keys(const json& node, const std::string& path,
                         std::initializer_list<const char*> allowed) {
    for (const auto& item : node.items()) {
        bool known = false;
        for (const char* key : allowed)
            if (item.key() == key) known = true;
        if (!known) fail(path.empty() ? item.key() : path + "." + item.key(), "unknown key");
    }
}

double as_number(const json& node, const std::string& path) {
    if (!node.is_number()) fail(path, "expected a number");
    return node.get<double>();
}

int as_int(const json& node, const std::string& path) {
    if (!node.is_number_integer()) fail(path, "expected an integer");
    return node.get<int>();
}

bool as_bool(const json& node, const std::string& path) {
    if (!node.is_boolean()) fail(path, "expected a boolean");
    return node.get<bool>();
}

Eigen::MatrixXd as_matrix(const json& node, const std::string& path) {
    if (!node.is_array() || node.empty()) fail(path, "expected a nonempty array of rows");
    const size_t rows = node.size();
    size_t cols = 0;
    for (size_t r = 0; r < rows; ++r) {
        const json& row = node[r];
        if (!row.is_array() || row.empty())
            fail(path + "[" + std::to_string(r + 1) + "]", "expected a nonempty row array");
        if (r == 0)
            cols = row.size();
        else if (row.size() != cols)
            fail(path + "[" + std::to_string(r + 1) + "]",
                 "row length " + std::to_string(row.size()) + " differs from row 1 (" +
                     std::to_string(cols) + ")");
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (size_t r = 0; r < rows; ++r)
        for (size_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = as_number(
                node[r][c],
                path + "[" + std::to_string(r + 1) + "][" + std::to_string(c + 1) + "]");
    return m;
}

SequenceMode as_sequence_mode(const json& node, const std::string& path) {
    if (!node.is_string()) fail(path, "expected \"iid\" or \"frequency_exact\"");
    const std::string value = node.get<std::string>();
    if (value == "iid") return SequenceMode::Iid;
    if (value == "frequency_exact") return SequenceMode::FrequencyExact;
    fail(path, "expected \"iid\" or \"frequency_exact\", got \"" + value + "\"");
}

ExperimentConfig parse_json(const json& root) {
    require_object(root, "(top level)");
    reject_unknown_keys(root, "", {"plants", "network", "partition", "simulation", "synthesis"});
    for (const char* key : {"plants", "network", "partition"})
        if (!root.contains(key)) fail(key, "required key is missing");

    ExperimentConfig config;

    const json& plants = root["plants"];
    if (!plants.is_array() || plants.empty()) fail("plants", "expected a nonempty array");
    for (size_t i = 0; i < plants.size(); ++i) {
        const std::string where = "plants[" + std::to_string(i + 1) + "]";
        const json& node = plants[i];
        require_object(node, where);
        reject_unknown_keys(node, where, {"A", "B", "K"});
        if (!node.contains("A")) fail(where + ".A", "required key is missing");
        if (!node.contains("B")) fail(where + ".B", "required key is missing");
        Plant plant;
        plant.index = static_cast<int>(i) + 1;
        plant.A = as_matrix(node["A"], where + ".A");
        plant.B = as_matrix(node["B"], where + ".B");
        if (plant.A.rows() != plant.A.cols()) fail(where + ".A", "must be square");
        if (plant.B.rows() != plant.A.rows()) fail(where + ".B", "row count mismatch with A");
        if (node.contains("K")) {
            plant.K = as_matrix(node["K"], where + ".K");
            if (plant.K->rows() != plant.B.cols() || plant.K->cols() != plant.A.rows())
                fail(where + ".K", "must be " + std::to_string(plant.B.cols()) + "x" +
                                       std::to_string(plant.A.rows()));
        }
        config.model.plants.push_back(std::move(plant));
    }

    {
        const json& network = root["network"];
        require_object(network, "network");
        reject_unknown_keys(network, "network", {"capacity", "loss_probability"});
        if (!network.contains("capacity")) fail("network.capacity", "required key is missing");
        if (!network.contains("loss_probability"))
            fail("network.loss_probability", "required key is missing");
        config.model.network.capacity = as_int(network["capacity"], "network.capacity");
        config.model.network.loss_probability =
            as_number(network["loss_probability"], "network.loss_probability");
    }

    {
        const json& partition = root["partition"];
        require_object(partition, "partition");
        reject_unknown_keys(partition, "partition", {"sets", "probabilities"});
        if (!partition.contains("sets")) fail("partition.sets", "required key is missing");
        if (!partition.contains("probabilities"))
            fail("partition.probabilities", "required key is missing");
        const json& sets = partition["sets"];
        if (!sets.is_array() || sets.empty())
            fail("partition.sets", "expected a nonempty array of sets");
        for (size_t j = 0; j < sets.size(); ++j) {
            const std::string where = "partition.sets[" + std::to_string(j + 1) + "]";
            if (!sets[j].is_array()) fail(where, "expected an array of plant indices");
            std::vector<int> members;
            for (size_t k = 0; k < sets[j].size(); ++k)
                members.push_back(
                    as_int(sets[j][k], where + "[" + std::to_string(k + 1) + "]"));
            config.model.partition.sets.push_back(std::move(members));
        }
        const json& probabilities = partition["probabilities"];
        if (!probabilities.is_array())
            fail("partition.probabilities", "expected an array of numbers");
        for (size_t j = 0; j < probabilities.size(); ++j)
            config.model.partition.probabilities.push_back(as_number(
                probabilities[j], "partition.probabilities[" + std::to_string(j + 1) + "]"));
        if (config.model.partition.sets.size() != config.model.partition.probabilities.size())
            fail("partition.probabilities",
                 "length differs from partition.sets (" +
                     std::to_string(config.model.partition.probabilities.size()) + " vs " +
                     std::to_string(config.model.partition.sets.size()) + ")");
    }

    if (root.contains("simulation")) {
        const json& sim = root["simulation"];
        require_object(sim, "simulation");
        reject_unknown_keys(sim, "simulation",
                            {"horizon", "runs", "seed", "schedule_mode", "loss_mode",
                             "tie_channels", "x0_box"});
        if (sim.contains("horizon"))
            config.simulation.horizon = as_int(sim["horizon"], "simulation.horizon");
        if (sim.contains("runs")) config.simulation.runs = as_int(sim["runs"], "simulation.runs");
        if (sim.contains("seed")) {
            const json& seed = sim["seed"];
            if (!seed.is_number_integer() ||
                (seed.is_number_integer() && !seed.is_number_unsigned() &&
                 seed.get<long long>() < 0))
                fail("simulation.seed", "expected a nonnegative integer");
            config.simulation.seed.value = seed.get<std::uint64_t>();
        }
        if (sim.contains("schedule_mode"))
            config.simulation.schedule_mode =
                as_sequence_mode(sim["schedule_mode"], "simulation.schedule_mode");
        if (sim.contains("loss_mode"))
            config.simulation.loss_mode =
                as_sequence_mode(sim["loss_mode"], "simulation.loss_mode");
        if (sim.contains("tie_channels"))
            config.simulation.tie_channels =
                as_bool(sim["tie_channels"], "simulation.tie_channels");
        if (sim.contains("x0_box"))
            config.simulation.x0_box = as_number(sim["x0_box"], "simulation.x0_box");
        if (config.simulation.horizon < 1) fail("simulation.horizon", "must be >= 1");
        if (config.simulation.runs < 1) fail("simulation.runs", "must be >= 1");
        if (!(config.simulation.x0_box >= 0.0)) fail("simulation.x0_box", "must be nonnegative");
    }

    if (root.contains("synthesis")) {
        const json& synthesis = root["synthesis"];
        require_object(synthesis, "synthesis");
        reject_unknown_keys(synthesis, "synthesis", {"beta_schedule"});
        if (synthesis.contains("beta_schedule")) {
            const json& schedule = synthesis["beta_schedule"];
            if (!schedule.is_array() || schedule.empty())
                fail("synthesis.beta_schedule", "expected a nonempty array of positive numbers");
            config.beta_schedule.clear();
            for (size_t i = 0; i < schedule.size(); ++i) {
                const std::string where =
                    "synthesis.beta_schedule[" + std::to_string(i + 1) + "]";
                const double beta = as_number(schedule[i], where);
                if (!(beta > 0.0)) fail(where, "must be positive");
                config.beta_schedule.push_back(beta);
            }
        }
    }

    try {
        validate_model(config.model);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return config;
}

}  // namespace

ExperimentConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

ExperimentConfig parse_config_text(std::string_view text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    return parse_json(root);
}

const char* to_string(SequenceMode mode) {
    return mode == SequenceMode::Iid ? "iid" : "frequency_exact";
}

}  // namespace ncs
