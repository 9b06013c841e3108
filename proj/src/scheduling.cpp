#include "ncs/scheduling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ncs {

namespace {

// Generators only need the probability part of the partition to be sound;
// set contents are checked against N and M by validate_partition.
void require_admissible(const Partition& partition) {
    if (partition.sets.size() != partition.probabilities.size())
        throw std::invalid_argument("schedule generation: sets/probabilities length mismatch");
    if (partition.sets.empty())
        throw std::invalid_argument("schedule generation: partition has no sets");
    double sum = 0.0;
    for (double p : partition.probabilities) {
        if (!(p > 0.0 && p < 1.0))
            throw std::invalid_argument(
                "schedule generation: probabilities must lie strictly inside (0,1)");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kProbabilitySumTol)
        throw std::invalid_argument("schedule generation: probabilities sum to " +
                                    std::to_string(sum) + ", expected 1");
    for (const auto& s : partition.sets)
        if (s.empty())
            throw std::invalid_argument("schedule generation: partition contains an empty set");
}

}  // namespace

ScheduleLogic generate_schedule_iid(const Partition& partition, int horizon, RngSeed seed) {
    require_admissible(partition);
    if (horizon < 0) throw std::invalid_argument("schedule generation: negative horizon");

    RngStream stream(seed, "schedule");
    ScheduleLogic logic;
    logic.horizon = horizon;
    logic.assignments.resize(static_cast<size_t>(horizon));
    for (int t = 0; t < horizon; ++t)
        logic.assignments[static_cast<size_t>(t)] =
            stream.next_category(partition.probabilities) + 1;
    return logic;
}

std::vector<int> frequency_exact_counts(std::span<const double> probabilities, int horizon) {
    if (horizon < 1) throw std::invalid_argument("frequency_exact_counts: horizon must be >= 1");
    const size_t v = probabilities.size();
    std::vector<int> counts(v);
    std::vector<double> remainders(v);
    long long assigned = 0;
    for (size_t j = 0; j < v; ++j) {
        double raw = probabilities[j] * horizon;
        counts[j] = static_cast<int>(std::floor(raw));
        remainders[j] = raw - counts[j];
        assigned += counts[j];
    }
    long long leftover = horizon - assigned;
    std::vector<size_t> order(v);
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return remainders[a] > remainders[b]; });
    for (long long k = 0; k < leftover; ++k) counts[order[static_cast<size_t>(k) % v]] += 1;
    return counts;
}

ScheduleLogic generate_schedule_frequency_exact(const Partition& partition, int horizon,
                                                RngSeed seed) {
    require_admissible(partition);
    if (horizon < 1)
        throw std::invalid_argument("frequency-exact schedule: horizon must be >= 1");

    std::vector<int> counts = frequency_exact_counts(partition.probabilities, horizon);
    ScheduleLogic logic;
    logic.horizon = horizon;
    logic.assignments.reserve(static_cast<size_t>(horizon));
    for (size_t j = 0; j < counts.size(); ++j)
        logic.assignments.insert(logic.assignments.end(), static_cast<size_t>(counts[j]),
                                 static_cast<int>(j) + 1);

    RngStream stream(seed, "schedule");
    stream.shuffle(logic.assignments);
    return logic;
}

DataLossSignal generate_loss_signal(double loss_probability, int channels, int horizon,
                                    RngSeed seed, SequenceMode mode, bool tie_channels) {
    if (!(loss_probability >= 0.0 && loss_probability < 1.0))
        throw std::invalid_argument("loss generation: loss probability must lie in [0, 1)");
    if (channels < 1) throw std::invalid_argument("loss generation: need at least one channel");
    if (horizon < 0) throw std::invalid_argument("loss generation: negative horizon");

    DataLossSignal signal;
    signal.horizon = horizon;
    signal.channels.resize(static_cast<size_t>(channels));

    auto generate_one = [&](int channel) {
        std::vector<std::uint8_t> bits(static_cast<size_t>(horizon), 0);
        RngStream stream(seed, "loss", 0, static_cast<std::uint64_t>(channel));
        if (mode == SequenceMode::Iid) {
            for (auto& b : bits) b = stream.next_bernoulli(loss_probability) ? 1 : 0;
        } else {
            auto drops = static_cast<size_t>(std::llround(loss_probability * horizon));
            std::fill_n(bits.begin(), std::min(drops, bits.size()), std::uint8_t{1});
            stream.shuffle(bits);
        }
        return bits;
    };

    signal.channels[0] = generate_one(1);
    for (int m = 2; m <= channels; ++m)
        signal.channels[static_cast<size_t>(m - 1)] =
            tie_channels ? signal.channels[0] : generate_one(m);
    return signal;
}

}  // namespace ncs
