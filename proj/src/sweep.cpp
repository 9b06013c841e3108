#include "ncs/sweep.hpp"

#include "ncs/stability.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>

namespace ncs {

namespace {

// Set partitions of {0..n-1} enumerated through restricted growth strings;
// blocks come out ordered by their smallest member.
void enumerate_partitions(int n, int max_block,
                          const std::function<void(const std::vector<std::vector<int>>&)>& emit) {
    std::vector<int> labels(static_cast<size_t>(n), 0);
    std::function<void(int, int)> recurse = [&](int i, int max_label) {
        if (i == n) {
            std::vector<std::vector<int>> blocks(static_cast<size_t>(max_label + 1));
            for (int k = 0; k < n; ++k)
                blocks[static_cast<size_t>(labels[static_cast<size_t>(k)])].push_back(k + 1);
            for (const auto& block : blocks)
                if (static_cast<int>(block.size()) > max_block) return;
            emit(blocks);
            return;
        }
        for (int label = 0; label <= max_label + 1; ++label) {
            labels[static_cast<size_t>(i)] = label;
            recurse(i + 1, std::max(max_label, label));
        }
    };
    recurse(0, -1);
}

void enumerate_compositions(int units, int parts,
                            const std::function<void(const std::vector<int>&)>& emit) {
    std::vector<int> current(static_cast<size_t>(parts));
    std::function<void(int, int)> recurse = [&](int index, int remaining) {
        if (index == parts - 1) {
            if (remaining >= 1) {
                current[static_cast<size_t>(index)] = remaining;
                emit(current);
            }
            return;
        }
        const int slots_left = parts - index - 1;
        for (int c = 1; c <= remaining - slots_left; ++c) {
            current[static_cast<size_t>(index)] = c;
            recurse(index + 1, remaining - c);
        }
    };
    if (parts >= 1) recurse(0, units);
}

}  // namespace

std::vector<SweepEntry> sweep_partitions(const NcsModel& model, const SweepOptions& options) {
    const int n = model.plant_count();
    if (n > 6)
        throw std::invalid_argument("sweep: capped at 6 plants, got " + std::to_string(n));
    if (!(options.grid_step >= 0.05 && options.grid_step <= 0.5))
        throw std::invalid_argument("sweep: grid step must lie in [0.05, 0.5]");
    const int units = static_cast<int>(std::lround(1.0 / options.grid_step));
    if (std::abs(units * options.grid_step - 1.0) > 1e-9)
        throw std::invalid_argument("sweep: grid step must divide 1 evenly");

    const double q = model.network.loss_probability;
    std::vector<ModePair> modes;
    modes.reserve(model.plants.size());
    for (const Plant& plant : model.plants) modes.push_back(mode_matrices(plant));

    // The radius of a plant depends on the partition only through its set's
    // probability, so one cache entry per (plant, grid point) covers the sweep.
    std::map<std::pair<int, int>, double> radius_cache;
    auto plant_radius = [&](int plant_pos, int prob_units) {
        auto key = std::make_pair(plant_pos, prob_units);
        auto it = radius_cache.find(key);
        if (it != radius_cache.end()) return it->second;
        ModeProbabilities probs;
        probs.closed_loop = (static_cast<double>(prob_units) / units) * (1.0 - q);
        probs.open_loop = 1.0 - probs.closed_loop;
        double radius =
            second_moment_lift(modes[static_cast<size_t>(plant_pos)], probs).radius;
        radius_cache.emplace(key, radius);
        return radius;
    };

    std::vector<SweepEntry> feasible;
    enumerate_partitions(n, model.network.capacity, [&](const std::vector<std::vector<int>>& sets) {
        const int v = static_cast<int>(sets.size());
        if (v > units) return;  // each set needs at least one grid unit
        enumerate_compositions(units, v, [&](const std::vector<int>& composition) {
            double worst = 0.0;
            bool ok = true;
            for (int j = 0; j < v && ok; ++j) {
                for (int plant : sets[static_cast<size_t>(j)]) {
                    const double radius =
                        plant_radius(plant - 1, composition[static_cast<size_t>(j)]);
                    worst = std::max(worst, radius);
                    if (!(radius < 1.0 - kStabilityMargin)) {
                        ok = false;
                        break;
                    }
                }
            }
            if (!ok) return;
            SweepEntry entry;
            entry.sets = sets;
            entry.probabilities.reserve(static_cast<size_t>(v));
            for (int c : composition)
                entry.probabilities.push_back(static_cast<double>(c) / units);
            entry.worst_radius = worst;
            feasible.push_back(std::move(entry));
        });
    });
    return feasible;
}

}  // namespace ncs
