#pragma once

#include "ncs/model.hpp"
#include "ncs/rng.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace ncs {

/// Which partition set holds the network at each step. Entries are 1-based
/// set indices into the partition that generated the logic.
struct ScheduleLogic {
    int horizon = 0;
    std::vector<int> assignments;  // length horizon
};

/// Per-channel packet-drop sequences; channels[m][t] == 1 means the packet on
/// channel m+1 is lost at step t.
struct DataLossSignal {
    int horizon = 0;
    std::vector<std::vector<std::uint8_t>> channels;
};

enum class SequenceMode { Iid, FrequencyExact };

/// Independent draws: set j at every step with probability p_j.
ScheduleLogic generate_schedule_iid(const Partition& partition, int horizon, RngSeed seed);

/// Exact occurrence counts round(p_j * horizon) (largest-remainder rounding),
/// uniformly permuted. Requires horizon >= 1.
ScheduleLogic generate_schedule_frequency_exact(const Partition& partition, int horizon,
                                                RngSeed seed);

/// Packet-drop sequences for `channels` channels. Iid mode draws Bernoulli(q)
/// per channel and step; FrequencyExact places exactly round(q * horizon)
/// drops per channel, uniformly permuted. tie_channels makes all channels
/// share channel 1's sequence.
DataLossSignal generate_loss_signal(double loss_probability, int channels, int horizon,
                                    RngSeed seed, SequenceMode mode, bool tie_channels);

/// Largest-remainder rounding of p_j * horizon: counts sum to horizon, ties
/// broken toward the lower index.
std::vector<int> frequency_exact_counts(std::span<const double> probabilities, int horizon);

}  // namespace ncs
