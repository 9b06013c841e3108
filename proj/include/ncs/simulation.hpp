#pragma once

#include "ncs/model.hpp"
#include "ncs/rng.hpp"
#include "ncs/scheduling.hpp"

#include <functional>
#include <vector>

namespace ncs {

// States whose squared norm exceeds this are treated as diverged so overflow
// cannot poison the aggregates.
inline constexpr double kDivergenceGuard = 1e100;

enum class Mode : std::uint8_t { ClosedLoop, OpenLoop };

inline char mode_tag(Mode mode) { return mode == Mode::ClosedLoop ? 's' : 'u'; }

/// One plant's trajectory in one run. For a completed run `states` holds
/// x(0)..x(T) and `modes` the T operating modes; a diverged run is truncated
/// at the last finite state and `divergence_step` names the first bad one.
struct TrajectoryRecord {
    int run = 1;          // 1-based
    int plant_index = 1;  // 1-based
    std::vector<Eigen::VectorXd> states;
    std::vector<double> norm_sq;
    std::vector<Mode> modes;
    bool diverged = false;
    int divergence_step = -1;
};

struct SimulationConfig {
    int horizon = 1000;
    int runs = 100;
    double x0_box = 1.0;  // initial states uniform in [-x0_box, x0_box]^d
    RngSeed seed{};
    SequenceMode schedule_mode = SequenceMode::Iid;
    SequenceMode loss_mode = SequenceMode::Iid;
    bool tie_channels = false;
};

/// Truncated estimate of the expected cost sum_{t<T} ||x(t)||^2, per plant.
/// Statistics cover completed runs only; diverged runs are counted aside.
struct CostEstimate {
    double mean = 0.0;
    double stddev = 0.0;     // sample standard deviation of the per-run sums
    double tail_mass = 0.0;  // mean partial sum over the last 10% of steps
    double closed_loop_frequency = 0.0;
    int completed_runs = 0;
    int diverged_runs = 0;
};

/// Operating mode of one plant at one step: closed loop iff the plant is in
/// the scheduled set and its channel (the plant's 1-based rank within the set,
/// ascending) carries no drop.
Mode resolve_mode(int plant_index, const std::vector<int>& scheduled_set,
                  const std::vector<std::uint8_t>& channel_loss);

/// Evolve every plant over one schedule/loss pair: x(t+1) = A_mode x(t).
/// Requires gains on all plants and equal horizons.
std::vector<TrajectoryRecord> simulate(const NcsModel& model, const ScheduleLogic& schedule,
                                       const DataLossSignal& loss,
                                       const std::vector<Eigen::VectorXd>& initial_states,
                                       int run_index = 1);

using TrajectorySink = std::function<void(const TrajectoryRecord&)>;

/// Monte Carlo estimate over `runs` independent runs; schedule, loss signal
/// and initial states of run r derive from (seed, r), so results do not
/// depend on worker count (capped by the NCS_THREADS environment variable).
/// The optional sink receives every record in (run, plant) order.
std::vector<CostEstimate> estimate_cost(const NcsModel& model, const SimulationConfig& config,
                                        const TrajectorySink& sink = {});

}  // namespace ncs
