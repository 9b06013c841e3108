#pragma once

#include "ncs/model.hpp"

#include <vector>

namespace ncs {

struct SweepEntry {
    std::vector<std::vector<int>> sets;
    std::vector<double> probabilities;
    double worst_radius = 0.0;  // max second-moment radius over the plants
};

struct SweepOptions {
    double grid_step = 0.1;  // probability grid resolution, >= 0.05
};

/// Exhaustive search over access partitions and gridded probabilities: every
/// set partition of {1..N} with block sizes <= capacity is paired with every
/// probability vector on the grid, and the combinations under which all
/// plants are stochastically stable (with their existing gains) are returned.
/// Capped at N <= 6 plants to keep the enumeration tractable.
std::vector<SweepEntry> sweep_partitions(const NcsModel& model, const SweepOptions& options = {});

}  // namespace ncs
