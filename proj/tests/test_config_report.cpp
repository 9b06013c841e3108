#include "ncs/config.hpp"

#include "example_systems.hpp"
#include "ncs/errors.hpp"
#include "ncs/plots.hpp"
#include "ncs/report.hpp"
#include "ncs/stability.hpp"
#include "ncs/sweep.hpp"
#include "ncs/synthesis.hpp"

#include <doctest.h>

#include <sstream>

using namespace ncs;

namespace {

const char* kMinimalConfig = R"({
  "plants": [
    {"A": [[1.1, 0.0], [0.0, 0.9]], "B": [[1.0], [0.5]], "K": [[-0.4, 0.0]]},
    {"A": [[1.05]], "B": [[1.0]], "K": [[-0.5]]}
  ],
  "network": {"capacity": 1, "loss_probability": 0.2},
  "partition": {"sets": [[1], [2]], "probabilities": [0.5, 0.5]}
})";

std::string patched(const std::string& base, const std::string& needle,
                    const std::string& replacement) {
    std::string out = base;
    const size_t at = out.find(needle);
    REQUIRE(at != std::string::npos);
    out.replace(at, needle.size(), replacement);
    return out;
}

}  // namespace

TEST_CASE("parse_config on the shipped fixtures") {
    SUBCASE("example 1 parses, validates and matches the transcribed data") {
        const ExperimentConfig config = parse_config(fixtures::path("example1.json"));
        CHECK(config.model.plant_count() == 2);
        CHECK(config.model.network.capacity == 1);
        CHECK(config.model.network.loss_probability == 0.3);
        CHECK(config.model.plants[0].A == fixtures::ex1_A1());
        CHECK(config.model.plants[1].B == fixtures::ex1_B2());
        CHECK(*config.model.plants[1].K == fixtures::ex1_K2());
        CHECK(validate_partition(config.model.partition, 2, 1).empty());
        CHECK(config.simulation.horizon == 1000);
        CHECK(config.simulation.schedule_mode == SequenceMode::FrequencyExact);
    }
    SUBCASE("example 2 parses with five identical plants") {
        const ExperimentConfig config = parse_config(fixtures::path("example2.json"));
        CHECK(config.model.plant_count() == 5);
        for (const Plant& plant : config.model.plants) {
            CHECK(plant.A == fixtures::ex2_A());
            CHECK(*plant.K == fixtures::ex2_K());
        }
        CHECK(config.simulation.tie_channels);
    }
    SUBCASE("the no-gain variants leave K unset") {
        const ExperimentConfig config = parse_config(fixtures::path("example2_nogains.json"));
        for (const Plant& plant : config.model.plants) CHECK(!plant.K.has_value());
    }
    SUBCASE("defaults applied when simulation/synthesis are absent") {
        const ExperimentConfig config = parse_config_text(kMinimalConfig);
        CHECK(config.simulation.horizon == 1000);
        CHECK(config.simulation.runs == 100);
        CHECK(config.simulation.seed.value == 0);
        CHECK(config.simulation.schedule_mode == SequenceMode::Iid);
        CHECK(config.simulation.x0_box == 1.0);
        CHECK(config.beta_schedule == std::vector<double>{1.0, 10.0, 100.0, 1000.0});
    }
}

TEST_CASE("parse_config rejections name the JSON path") {
    SUBCASE("probability sum violation points at partition.probabilities") {
        const std::string text =
            patched(kMinimalConfig, "[0.5, 0.5]", "[0.6, 0.5]");
        CHECK_THROWS_WITH_AS((void)parse_config_text(text),
                             doctest::Contains("partition.probabilities"), ConfigError);
    }
    SUBCASE("capacity out of range") {
        const std::string text = patched(kMinimalConfig, "\"capacity\": 1", "\"capacity\": 2");
        CHECK_THROWS_WITH_AS((void)parse_config_text(text), doctest::Contains("0 < M < N"),
                             ConfigError);
    }
    SUBCASE("unknown keys are rejected everywhere") {
        CHECK_THROWS_WITH_AS(
            (void)parse_config_text(patched(kMinimalConfig, "\"network\"", "\"Network\"")),
            doctest::Contains("Network"), ConfigError);
        const std::string extra = patched(kMinimalConfig, "\"capacity\": 1,",
                                          "\"capacity\": 1, \"loss\": 0.0,");
        CHECK_THROWS_WITH_AS((void)parse_config_text(extra), doctest::Contains("network.loss"),
                             ConfigError);
    }
    SUBCASE("matrix shape mismatch points at the plant") {
        const std::string text =
            patched(kMinimalConfig, "\"B\": [[1.0], [0.5]]", "\"B\": [[1.0]]");
        CHECK_THROWS_WITH_AS((void)parse_config_text(text),
                             doctest::Contains("plants[1].B"), ConfigError);
    }
    SUBCASE("ragged matrix rows are rejected") {
        const std::string text = patched(kMinimalConfig, "[[1.1, 0.0], [0.0, 0.9]]",
                                         "[[1.1, 0.0], [0.9]]");
        CHECK_THROWS_AS((void)parse_config_text(text), ConfigError);
    }
    SUBCASE("runs = 0 fails validation") {
        const std::string text =
            patched(kMinimalConfig, "\"partition\": {\"sets\": [[1], [2]], "
                                    "\"probabilities\": [0.5, 0.5]}",
                    "\"partition\": {\"sets\": [[1], [2]], \"probabilities\": [0.5, 0.5]},\n"
                    "  \"simulation\": {\"runs\": 0}");
        CHECK_THROWS_WITH_AS((void)parse_config_text(text), doctest::Contains("simulation.runs"),
                             ConfigError);
    }
    SUBCASE("malformed JSON is a config error") {
        CHECK_THROWS_WITH_AS((void)parse_config_text("{\"plants\": ["),
                             doctest::Contains("invalid JSON"), ConfigError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS((void)parse_config("/nonexistent/nowhere.json"), ConfigError);
    }
}

TEST_CASE("17-significant-digit formatting round-trips") {
    CHECK(format_sig17(0.1) == "0.10000000000000001");
    CHECK(format_sig17(1.0) == "1");
    CHECK(format_sig17(-0.28) == "-0.28000000000000003");
    RngStream stream(RngSeed{31}, "roundtrip");
    for (int i = 0; i < 500; ++i) {
        const double x = stream.next_symmetric(1e6) * std::pow(10.0, stream.next_symmetric(12));
        CHECK(std::stod(format_sig17(x)) == x);
    }
}

TEST_CASE("dump_json is deterministic and preserves key order") {
    ordered_json j;
    j["zeta"] = 1;
    j["alpha"] = 0.3;
    j["matrix"] = matrix_to_json(fixtures::ex1_P2s());
    const std::string once = dump_json(j);
    const std::string twice = dump_json(j);
    CHECK(once == twice);
    CHECK(once.find("\"zeta\"") < once.find("\"alpha\""));
    CHECK(once.find("0.29999999999999999") != std::string::npos);
}

TEST_CASE("certificate report round-trips through verification") {
    const ExperimentConfig config = parse_config(fixtures::path("example1.json"));
    const NcsAnalysis analysis = analyze_ncs(config.model);
    const ordered_json report =
        certificate_report(config.model, analysis, {}, config.simulation.seed);

    CHECK(report.at("overall_stable").get<bool>());
    for (const auto& node : report.at("plants")) {
        const int index = node.at("index").get<int>();
        const bool stable = node.at("stable").get<bool>();
        REQUIRE(stable == node.contains("P_s"));
        const Plant& plant = config.model.plant(index);
        const auto probs = mode_probabilities(config.model.partition, index,
                                              config.model.network.loss_probability);
        const auto check = verify_certificate(mode_matrices(plant), probs,
                                              matrix_from_json(node.at("P_s")),
                                              matrix_from_json(node.at("P_u")));
        CHECK(check.valid == stable);
    }

    // Serialize, reparse, and verify again from the parsed text.
    const ordered_json reparsed = ordered_json::parse(dump_json(report));
    for (const auto& node : reparsed.at("plants")) {
        const int index = node.at("index").get<int>();
        const Plant& plant = config.model.plant(index);
        const auto probs = mode_probabilities(config.model.partition, index,
                                              config.model.network.loss_probability);
        const auto check = verify_certificate(mode_matrices(plant), probs,
                                              matrix_from_json(node.at("P_s")),
                                              matrix_from_json(node.at("P_u")));
        CHECK(check.valid == node.at("stable").get<bool>());
    }
}

TEST_CASE("model_to_json round-trips through parse_config_text") {
    const ExperimentConfig config = parse_config(fixtures::path("example2.json"));
    const std::string text = dump_json(model_to_json(config));
    const ExperimentConfig reparsed = parse_config_text(text);
    CHECK(reparsed.model.plant_count() == config.model.plant_count());
    for (int i = 0; i < config.model.plant_count(); ++i) {
        CHECK(reparsed.model.plants[static_cast<size_t>(i)].A ==
              config.model.plants[static_cast<size_t>(i)].A);
        CHECK(*reparsed.model.plants[static_cast<size_t>(i)].K ==
              *config.model.plants[static_cast<size_t>(i)].K);
    }
    CHECK(reparsed.model.partition.sets == config.model.partition.sets);
    CHECK(reparsed.simulation.seed.value == config.simulation.seed.value);
    CHECK(reparsed.simulation.tie_channels == config.simulation.tie_channels);
    // A second serialization is byte-identical.
    CHECK(dump_json(model_to_json(reparsed)) == text);
}

TEST_CASE("synthesized model survives the write-parse-analyze round trip") {
    ExperimentConfig config = parse_config(fixtures::path("example1_nogains.json"));
    for (Plant& plant : config.model.plants) {
        const auto probs = mode_probabilities(config.model.partition, plant.index,
                                              config.model.network.loss_probability);
        const SynthesisResult result = synthesize(plant, probs, config.beta_schedule);
        REQUIRE(result.verified);
        plant.K = result.K;
    }
    const NcsAnalysis direct = analyze_ncs(config.model);
    REQUIRE(direct.all_stable);

    const ExperimentConfig reparsed = parse_config_text(dump_json(model_to_json(config)));
    const NcsAnalysis reanalyzed = analyze_ncs(reparsed.model);
    CHECK(reanalyzed.all_stable);
    REQUIRE(reanalyzed.plants.size() == direct.plants.size());
    for (size_t p = 0; p < direct.plants.size(); ++p) {
        CHECK(reanalyzed.plants[p].decision.stable == direct.plants[p].decision.stable);
        CHECK(reanalyzed.plants[p].decision.radius == direct.plants[p].decision.radius);
    }
}

TEST_CASE("csv writers") {
    SUBCASE("schedule and loss headers and shapes") {
        ScheduleLogic schedule;
        schedule.horizon = 3;
        schedule.assignments = {2, 1, 2};
        std::ostringstream out;
        write_schedule_csv(out, schedule);
        CHECK(out.str() == "t,set_index\n0,2\n1,1\n2,2\n");

        DataLossSignal loss;
        loss.horizon = 2;
        loss.channels = {{1, 0}, {0, 1}};
        std::ostringstream lout;
        write_loss_csv(lout, loss);
        CHECK(lout.str() == "t,channel,lost\n0,1,1\n0,2,0\n1,1,0\n1,2,1\n");
    }
    SUBCASE("trajectory rows carry the mode tag and 17-digit norms") {
        TrajectoryRecord record;
        record.run = 3;
        record.plant_index = 2;
        record.norm_sq = {1.0, 0.25, 0.0625};
        record.modes = {Mode::OpenLoop, Mode::ClosedLoop};
        std::ostringstream out;
        write_trajectory_csv_header(out);
        write_trajectory_csv_rows(out, record);
        CHECK(out.str() == "run,t,plant,mode,norm_sq\n3,0,2,u,1\n3,1,2,s,0.25\n");
    }
}

TEST_CASE("svg writers emit well-formed plots") {
    std::ostringstream trajectory;
    write_trajectory_svg(trajectory, "demo", {{1.0, 0.5, 0.25}, {2.0, 1.0, 0.0}});
    CHECK(trajectory.str().find("<svg") == 0);
    CHECK(trajectory.str().find("<polyline") != std::string::npos);
    CHECK(trajectory.str().rfind("</svg>\n") != std::string::npos);

    ScheduleLogic schedule;
    schedule.horizon = 4;
    schedule.assignments = {1, 2, 2, 1};
    std::ostringstream sched;
    write_schedule_svg(sched, schedule, 2);
    CHECK(sched.str().find("<polyline") != std::string::npos);

    DataLossSignal loss;
    loss.horizon = 4;
    loss.channels = {{0, 1, 0, 1}};
    std::ostringstream lsvg;
    write_loss_svg(lsvg, loss);
    CHECK(lsvg.str().find("<polyline") != std::string::npos);
}

TEST_CASE("sweep finds the benchmark partition for the five-plant example") {
    const ExperimentConfig config = parse_config(fixtures::path("example2.json"));
    const auto entries = sweep_partitions(config.model, SweepOptions{0.1});
    CHECK(!entries.empty());

    const std::vector<std::vector<int>> target{{1, 2}, {3, 4}, {5}};
    bool found = false;
    for (const SweepEntry& entry : entries) {
        if (entry.sets != target) continue;
        if (std::abs(entry.probabilities[0] - 0.3) <= 0.1 + 1e-12 &&
            std::abs(entry.probabilities[1] - 0.3) <= 0.1 + 1e-12 &&
            std::abs(entry.probabilities[2] - 0.4) <= 0.1 + 1e-12) {
            found = true;
            CHECK(entry.worst_radius < 1.0);
        }
    }
    CHECK(found);

    // Every reported entry re-checks as stable through the analyzer.
    const SweepEntry& first = entries.front();
    NcsModel model = config.model;
    model.partition.sets = first.sets;
    model.partition.probabilities = first.probabilities;
    CHECK(analyze_ncs(model).all_stable);
}

TEST_CASE("sweep guardrails") {
    const ExperimentConfig config = parse_config(fixtures::path("example2.json"));
    CHECK_THROWS_AS((void)sweep_partitions(config.model, SweepOptions{0.03}),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)sweep_partitions(config.model, SweepOptions{0.07}),
                    std::invalid_argument);
}
