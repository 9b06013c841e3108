#pragma once

#include "ncs/scheduling.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace ncs {

/// Squared-norm trajectories on a log-scaled vertical axis, one polyline per
/// run. `series` holds ||x(t)||^2 samples per run, possibly ragged.
void write_trajectory_svg(std::ostream& out, const std::string& title,
                          const std::vector<std::vector<double>>& series);

/// Step plot of the scheduled set index over time.
void write_schedule_svg(std::ostream& out, const ScheduleLogic& schedule, int set_count);

/// Step plots of the per-channel drop sequences, one lane per channel.
void write_loss_svg(std::ostream& out, const DataLossSignal& loss);

}  // namespace ncs
