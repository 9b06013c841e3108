#include "ncs/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>

namespace ncs {

Mode resolve_mode(int plant_index, const std::vector<int>& scheduled_set,
                  const std::vector<std::uint8_t>& channel_loss) {
    int rank = 0;
    bool member = false;
    for (int idx : scheduled_set) {
        if (idx < plant_index) ++rank;
        if (idx == plant_index) member = true;
    }
    if (!member) return Mode::OpenLoop;
    if (rank >= static_cast<int>(channel_loss.size()))
        throw std::invalid_argument("resolve_mode: scheduled set is larger than the channel count");
    return channel_loss[static_cast<size_t>(rank)] ? Mode::OpenLoop : Mode::ClosedLoop;
}

std::vector<TrajectoryRecord> simulate(const NcsModel& model, const ScheduleLogic& schedule,
                                       const DataLossSignal& loss,
                                       const std::vector<Eigen::VectorXd>& initial_states,
                                       int run_index) {
    if (schedule.horizon != loss.horizon)
        throw std::invalid_argument("simulate: schedule and loss signal horizons differ");
    if (static_cast<int>(loss.channels.size()) != model.network.capacity)
        throw std::invalid_argument("simulate: loss signal channel count does not match capacity");
    if (initial_states.size() != model.plants.size())
        throw std::invalid_argument("simulate: one initial state per plant required");

    const int horizon = schedule.horizon;
    const int set_count = model.partition.set_count();
    for (int j : schedule.assignments)
        if (j < 1 || j > set_count)
            throw std::invalid_argument("simulate: schedule references set " + std::to_string(j) +
                                        " outside 1.." + std::to_string(set_count));

    std::vector<TrajectoryRecord> records;
    records.reserve(model.plants.size());
    std::vector<std::uint8_t> drops(static_cast<size_t>(model.network.capacity));

    for (size_t p = 0; p < model.plants.size(); ++p) {
        const Plant& plant = model.plants[p];
        const ModePair modes = mode_matrices(plant);
        const Eigen::VectorXd& x0 = initial_states[p];
        if (x0.size() != plant.state_dim())
            throw std::invalid_argument("simulate: initial state of plant " +
                                        std::to_string(plant.index) + " has wrong dimension");

        TrajectoryRecord record;
        record.run = run_index;
        record.plant_index = plant.index;
        record.states.reserve(static_cast<size_t>(horizon) + 1);
        record.norm_sq.reserve(static_cast<size_t>(horizon) + 1);
        record.modes.reserve(static_cast<size_t>(horizon));

        Eigen::VectorXd x = x0;
        record.states.push_back(x);
        record.norm_sq.push_back(x.squaredNorm());

        for (int t = 0; t < horizon; ++t) {
            const auto& scheduled =
                model.partition.sets[static_cast<size_t>(schedule.assignments[static_cast<size_t>(t)] - 1)];
            for (size_t m = 0; m < drops.size(); ++m)
                drops[m] = loss.channels[m][static_cast<size_t>(t)];
            const Mode mode = resolve_mode(plant.index, scheduled, drops);
            record.modes.push_back(mode);

            x = (mode == Mode::ClosedLoop ? modes.closed_loop : modes.open_loop) * x;
            const double nsq = x.squaredNorm();
            if (!std::isfinite(nsq) || nsq > kDivergenceGuard) {
                record.diverged = true;
                record.divergence_step = t + 1;
                break;
            }
            record.states.push_back(x);
            record.norm_sq.push_back(nsq);
        }
        records.push_back(std::move(record));
    }
    return records;
}

namespace {

int worker_count(int runs) {
    int workers = 0;
    if (const char* env = std::getenv("NCS_THREADS")) {
        char* end = nullptr;
        long parsed = std::strtol(env, &end, 10);
        if (end && *end == '\0' && parsed >= 1) workers = static_cast<int>(parsed);
    }
    if (workers == 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    return std::clamp(workers, 1, std::max(1, runs));
}

struct PlantAccumulator {
    std::vector<double> costs;
    std::vector<double> tails;
    long long closed_loop_steps = 0;
    long long mode_steps = 0;
    int diverged = 0;
};

}  // namespace

std::vector<CostEstimate> estimate_cost(const NcsModel& model, const SimulationConfig& config,
                                        const TrajectorySink& sink) {
    if (config.horizon < 1) throw std::invalid_argument("simulation.horizon: must be >= 1");
    if (config.runs < 1) throw std::invalid_argument("simulation.runs: must be >= 1");
    if (!(config.x0_box >= 0.0))
        throw std::invalid_argument("simulation.x0_box: must be nonnegative");

    const int horizon = config.horizon;
    const int tail_start = horizon - horizon / 10;

    auto run_one = [&](int run) {
        const RngSeed run_seed = derive_seed(config.seed, "run-index",
                                             static_cast<std::uint64_t>(run));
        ScheduleLogic schedule =
            config.schedule_mode == SequenceMode::Iid
                ? generate_schedule_iid(model.partition, horizon, run_seed)
                : generate_schedule_frequency_exact(model.partition, horizon, run_seed);
        DataLossSignal loss =
            generate_loss_signal(model.network.loss_probability, model.network.capacity,
                                 horizon, run_seed, config.loss_mode, config.tie_channels);
        std::vector<Eigen::VectorXd> x0(model.plants.size());
        for (size_t p = 0; p < model.plants.size(); ++p) {
            RngStream stream(run_seed, "initial-conditions", 0,
                             static_cast<std::uint64_t>(model.plants[p].index));
            Eigen::VectorXd x(model.plants[p].state_dim());
            for (Eigen::Index i = 0; i < x.size(); ++i)
                x(i) = stream.next_symmetric(config.x0_box);
            x0[p] = std::move(x);
        }
        return simulate(model, schedule, loss, x0, run);
    };

    std::vector<PlantAccumulator> accumulators(model.plants.size());
    auto consume = [&](std::vector<TrajectoryRecord>& records) {
        for (size_t p = 0; p < records.size(); ++p) {
            TrajectoryRecord& record = records[p];
            if (sink) sink(record);
            PlantAccumulator& acc = accumulators[p];
            if (record.diverged) {
                ++acc.diverged;
                continue;
            }
            double cost = 0.0;
            double tail = 0.0;
            for (int t = 0; t < horizon; ++t) {
                const double v = record.norm_sq[static_cast<size_t>(t)];
                cost += v;
                if (t >= tail_start) tail += v;
            }
            acc.costs.push_back(cost);
            acc.tails.push_back(tail);
            for (Mode mode : record.modes)
                if (mode == Mode::ClosedLoop) ++acc.closed_loop_steps;
            acc.mode_steps += static_cast<long long>(record.modes.size());
        }
    };

    const int workers = worker_count(config.runs);
    if (workers == 1) {
        for (int run = 1; run <= config.runs; ++run) {
            auto records = run_one(run);
            consume(records);
        }
    } else {
        // Runs are computed in parallel batches but consumed strictly in run
        // order, so output and aggregates never depend on the worker count.
        constexpr int kRunsPerWorker = 8;
        const int batch = workers * kRunsPerWorker;
        std::vector<std::vector<TrajectoryRecord>> slots(static_cast<size_t>(batch));
        for (int base = 0; base < config.runs; base += batch) {
            const int count = std::min(batch, config.runs - base);
            std::vector<std::thread> pool;
            pool.reserve(static_cast<size_t>(workers));
            for (int w = 0; w < workers; ++w) {
                pool.emplace_back([&, w]() {
                    for (int i = w; i < count; i += workers)
                        slots[static_cast<size_t>(i)] = run_one(base + i + 1);
                });
            }
            for (auto& worker : pool) worker.join();
            for (int i = 0; i < count; ++i) consume(slots[static_cast<size_t>(i)]);
        }
    }

    std::vector<CostEstimate> estimates(model.plants.size());
    for (size_t p = 0; p < model.plants.size(); ++p) {
        const PlantAccumulator& acc = accumulators[p];
        CostEstimate& est = estimates[p];
        est.completed_runs = static_cast<int>(acc.costs.size());
        est.diverged_runs = acc.diverged;
        if (!acc.costs.empty()) {
            double sum = 0.0;
            for (double c : acc.costs) sum += c;
            est.mean = sum / static_cast<double>(acc.costs.size());
            if (acc.costs.size() > 1) {
                double ss = 0.0;
                for (double c : acc.costs) ss += (c - est.mean) * (c - est.mean);
                est.stddev = std::sqrt(ss / static_cast<double>(acc.costs.size() - 1));
            }
            double tail_sum = 0.0;
            for (double t : acc.tails) tail_sum += t;
            est.tail_mass = tail_sum / static_cast<double>(acc.tails.size());
        }
        if (acc.mode_steps > 0)
            est.closed_loop_frequency = static_cast<double>(acc.closed_loop_steps) /
                                        static_cast<double>(acc.mode_steps);
    }
    return estimates;
}

}  // namespace ncs
