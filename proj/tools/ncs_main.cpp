#include "ncs/config.hpp"
#include "ncs/errors.hpp"
#include "ncs/plots.hpp"
#include "ncs/report.hpp"
#include "ncs/scheduling.hpp"
#include "ncs/simulation.hpp"
#include "ncs/stability.hpp"
#include "ncs/sweep.hpp"
#include "ncs/synthesis.hpp"
#include "ncs/version.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

// Tracks files written by one command so a failure never leaves partial
// artifacts behind.
class ArtifactSet {
public:
    ~ArtifactSet() {
        if (armed_) {
            for (const fs::path& p : paths_) {
                std::error_code ec;
                fs::remove(p, ec);
            }
        }
    }

    fs::path track(fs::path p) {
        paths_.push_back(p);
        return p;
    }

    void commit() { armed_ = false; }

private:
    std::vector<fs::path> paths_;
    bool armed_ = true;
};

struct CommonOptions {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<int> runs;
    std::optional<int> horizon;
    double grid_step = 0.1;
};

ncs::ExperimentConfig load(const CommonOptions& opts) {
    ncs::ExperimentConfig config = ncs::parse_config(opts.config_path);
    if (opts.seed) config.simulation.seed.value = *opts.seed;
    if (opts.runs) {
        if (*opts.runs < 1) throw ncs::ConfigError("simulation.runs: must be >= 1");
        config.simulation.runs = *opts.runs;
    }
    if (opts.horizon) {
        if (*opts.horizon < 1) throw ncs::ConfigError("simulation.horizon: must be >= 1");
        config.simulation.horizon = *opts.horizon;
    }
    return config;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

void print_analysis(const ncs::NcsAnalysis& analysis) {
    for (const auto& entry : analysis.plants) {
        const char* verdict = entry.decision.stable
                                  ? "stable"
                                  : (entry.decision.marginal ? "marginal" : "unstable");
        std::printf("plant %d: %s (pi_s=%.4g, second-moment radius=%.6g)\n", entry.plant_index,
                    verdict, entry.probs.closed_loop, entry.decision.radius);
    }
}

int cmd_analyze(const CommonOptions& opts) {
    ncs::ExperimentConfig config = load(opts);
    ncs::NcsAnalysis analysis = ncs::analyze_ncs(config.model);

    ArtifactSet artifacts;
    fs::create_directories(opts.out_dir);
    ncs::write_json_file(artifacts.track(fs::path(opts.out_dir) / "certificate.json"),
                         ncs::certificate_report(config.model, analysis, {},
                                                 config.simulation.seed));
    artifacts.commit();

    print_analysis(analysis);
    std::printf("overall: %s\n", analysis.all_stable ? "stable" : "not stable");
    return analysis.all_stable ? 0 : 1;
}

int cmd_synthesize(const CommonOptions& opts) {
    ncs::ExperimentConfig config = load(opts);

    std::map<int, ncs::SynthesisMethod> methods;
    bool all_verified = true;
    for (ncs::Plant& plant : config.model.plants) {
        if (plant.K) continue;
        const auto probs = ncs::mode_probabilities(config.model.partition, plant.index,
                                                   config.model.network.loss_probability);
        ncs::SynthesisResult result = ncs::synthesize(plant, probs, config.beta_schedule);
        plant.K = result.K;
        methods[plant.index] = result.method;
        all_verified = all_verified && result.verified;
        std::printf("plant %d: %s gain via %s (radius=%.6g)\n", plant.index,
                    result.verified ? "verified" : "UNVERIFIED", to_string(result.method),
                    result.radius);
    }

    ncs::NcsAnalysis analysis = ncs::analyze_ncs(config.model);

    ArtifactSet artifacts;
    fs::create_directories(opts.out_dir);
    ncs::write_json_file(artifacts.track(fs::path(opts.out_dir) / "model.json"),
                         ncs::model_to_json(config));
    ncs::write_json_file(artifacts.track(fs::path(opts.out_dir) / "certificate.json"),
                         ncs::certificate_report(config.model, analysis, methods,
                                                 config.simulation.seed));
    artifacts.commit();

    print_analysis(analysis);
    return (all_verified && analysis.all_stable) ? 0 : 1;
}

int cmd_schedule(const CommonOptions& opts) {
    ncs::ExperimentConfig config = load(opts);
    const auto& sim = config.simulation;
    // Emit exactly the sequences the first simulation run would use.
    const ncs::RngSeed run_seed = ncs::derive_seed(sim.seed, "run-index", 1);
    ncs::ScheduleLogic schedule =
        sim.schedule_mode == ncs::SequenceMode::Iid
            ? ncs::generate_schedule_iid(config.model.partition, sim.horizon, run_seed)
            : ncs::generate_schedule_frequency_exact(config.model.partition, sim.horizon,
                                                     run_seed);
    ncs::DataLossSignal loss = ncs::generate_loss_signal(
        config.model.network.loss_probability, config.model.network.capacity, sim.horizon,
        run_seed, sim.loss_mode, sim.tie_channels);

    ArtifactSet artifacts;
    fs::create_directories(opts.out_dir);
    {
        std::ostringstream csv;
        ncs::write_schedule_csv(csv, schedule);
        write_text(artifacts.track(fs::path(opts.out_dir) / "schedule.csv"), csv.str());
    }
    {
        std::ostringstream csv;
        ncs::write_loss_csv(csv, loss);
        write_text(artifacts.track(fs::path(opts.out_dir) / "loss.csv"), csv.str());
    }
    {
        std::ostringstream svg;
        ncs::write_schedule_svg(svg, schedule, config.model.partition.set_count());
        write_text(artifacts.track(fs::path(opts.out_dir) / "schedule.svg"), svg.str());
    }
    {
        std::ostringstream svg;
        ncs::write_loss_svg(svg, loss);
        write_text(artifacts.track(fs::path(opts.out_dir) / "loss.svg"), svg.str());
    }
    artifacts.commit();
    std::printf("wrote schedule.csv, loss.csv and step plots for horizon %d\n", sim.horizon);
    return 0;
}

int cmd_simulate(const CommonOptions& opts) {
    ncs::ExperimentConfig config = load(opts);
    const int plant_count = config.model.plant_count();

    ArtifactSet artifacts;
    fs::create_directories(opts.out_dir);
    std::ofstream csv(artifacts.track(fs::path(opts.out_dir) / "trajectories.csv"),
                      std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write trajectories.csv");
    ncs::write_trajectory_csv_header(csv);

    constexpr size_t kMaxPlottedRuns = 100;
    std::vector<std::vector<std::vector<double>>> plot_series(
        static_cast<size_t>(plant_count));

    auto sink = [&](const ncs::TrajectoryRecord& record) {
        ncs::write_trajectory_csv_rows(csv, record);
        auto& series = plot_series[static_cast<size_t>(record.plant_index - 1)];
        if (series.size() < kMaxPlottedRuns) series.push_back(record.norm_sq);
    };

    std::vector<ncs::CostEstimate> estimates =
        ncs::estimate_cost(config.model, config.simulation, sink);
    csv.close();

    ncs::write_json_file(artifacts.track(fs::path(opts.out_dir) / "cost.json"),
                         ncs::cost_report(config.simulation, estimates));
    for (int p = 1; p <= plant_count; ++p) {
        std::ostringstream svg;
        ncs::write_trajectory_svg(svg, "plant " + std::to_string(p) + " squared state norm",
                                  plot_series[static_cast<size_t>(p - 1)]);
        write_text(artifacts.track(fs::path(opts.out_dir) /
                                   ("plant_" + std::to_string(p) + ".svg")),
                   svg.str());
    }
    artifacts.commit();

    int diverged = 0;
    for (size_t p = 0; p < estimates.size(); ++p) {
        const auto& est = estimates[p];
        diverged += est.diverged_runs;
        std::printf("plant %zu: mean cost %.6g (stddev %.3g, tail %.3g, closed-loop freq %.4f, "
                    "%d/%d runs)\n",
                    p + 1, est.mean, est.stddev, est.tail_mass, est.closed_loop_frequency,
                    est.completed_runs, est.completed_runs + est.diverged_runs);
    }
    return diverged == 0 ? 0 : 1;
}

int cmd_sweep(const CommonOptions& opts) {
    ncs::ExperimentConfig config = load(opts);
    ncs::SweepOptions sweep_options;
    sweep_options.grid_step = opts.grid_step;
    std::vector<ncs::SweepEntry> entries = ncs::sweep_partitions(config.model, sweep_options);

    ArtifactSet artifacts;
    fs::create_directories(opts.out_dir);
    ncs::write_json_file(artifacts.track(fs::path(opts.out_dir) / "sweep.json"),
                         ncs::sweep_report(entries, sweep_options.grid_step));
    artifacts.commit();

    std::printf("%zu feasible (partition, probabilities) combinations\n", entries.size());
    return entries.empty() ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Probabilistic network-access scheduling and stochastic stability toolkit"};
    app.set_version_flag("--version", std::string(ncs::kToolVersion));
    app.require_subcommand(1);

    CommonOptions opts;
    auto add_common = [&](CLI::App* cmd, bool with_sim_flags) {
        cmd->add_option("--config", opts.config_path, "experiment JSON file")
            ->required()
            ->check(CLI::ExistingFile);
        cmd->add_option("--out", opts.out_dir, "output directory (default: current)");
        cmd->add_option("--seed", opts.seed, "override simulation.seed");
        if (with_sim_flags) {
            cmd->add_option("--runs", opts.runs, "override simulation.runs");
            cmd->add_option("--horizon", opts.horizon, "override simulation.horizon");
        }
    };

    CLI::App* analyze = app.add_subcommand("analyze", "stability certificates for a model");
    add_common(analyze, false);
    CLI::App* synthesize =
        app.add_subcommand("synthesize", "design gains for plants without one");
    add_common(synthesize, false);
    CLI::App* schedule =
        app.add_subcommand("schedule", "generate a scheduling logic and loss signal");
    add_common(schedule, true);
    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo closed-loop experiment");
    add_common(simulate, true);
    CLI::App* sweep =
        app.add_subcommand("sweep", "enumerate feasible partitions and probabilities");
    add_common(sweep, false);
    sweep->add_option("--grid-step", opts.grid_step, "probability grid step (default 0.1)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) return cmd_analyze(opts);
        if (synthesize->parsed()) return cmd_synthesize(opts);
        if (schedule->parsed()) return cmd_schedule(opts);
        if (simulate->parsed()) return cmd_simulate(opts);
        if (sweep->parsed()) return cmd_sweep(opts);
    } catch (const std::exception& e) {
        std::cerr << "ncs: error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
